"""Forward models, a finite-difference oracle, a digital lock-in and an
inverse fitter for 3-omega measurements of suspended rods and wires."""

from .core import (
    DerivedThermal,
    Drive,
    KnownProperties,
    Specimen,
    Thresholds,
    derive_thermal,
    feedback_rate,
    heating_rate,
    loss_rate,
    radial_loss_ratio,
    radiation_g,
    convection_g,
    self_heating_ratio,
)
from .errors import (
    AliasingError,
    ConfigurationError,
    ConvergenceError,
    FitDegeneracyError,
    FitError,
    InputError,
    ParameterError,
    ThreeOmegaError,
    WindowError,
)
from .spectral import (
    ErrorCurves,
    Phasor3w,
    SeriesControl,
    error_curves,
    resistance_fluctuation,
    temperature_profile,
    v3w_first_term,
    v3w_high_freq_limit,
    v3w_low_freq_limit,
    v3w_phasor,
)
from .fdm import GridSpec, TraceResult, apparent_from_oracle, oracle_phasor, oracle_sweep, solve
from .lockin import Demodulated, demodulate, fold_phase
from .fitting import (
    FitResult,
    PhaseFit,
    SweepDataset,
    V3wPoint,
    apparent_params,
    fit_amplitude,
    fit_phase,
    specific_heat,
    wiedemann_franz,
)
from .config import RunConfig, dump_config, load_config, parse_config
from .datasets import ingest_csv, write_sweep_csv
from .synth import NoiseSpec, generate_sweep, synthesize
from .pipeline import run_pipeline

__version__ = "0.1.0"
