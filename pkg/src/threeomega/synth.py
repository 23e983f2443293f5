"""Synthetic frequency sweeps from either forward engine, with optional seeded noise."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Drive, Specimen, loss_rate
from .datasets import known_to_meta
from .errors import ConfigurationError, ParameterError
from .fdm import GridSpec, oracle_sweep
from .fitting import SweepDataset, V3wPoint
from .spectral import DEFAULT_N_MAX, SeriesControl, v3w_phasor

ENGINES = ("spectral", "oracle")


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian noise: relative on the amplitude, absolute (radians) on the phase.

    The seed is mandatory so every synthetic dataset can be regenerated.
    """

    amplitude_rel: float
    phase_rad: float
    seed: int

    def __post_init__(self):
        if not (math.isfinite(self.amplitude_rel) and self.amplitude_rel >= 0):
            raise ParameterError("amplitude_rel", "must be non-negative")
        if not (math.isfinite(self.phase_rad) and self.phase_rad >= 0):
            raise ParameterError("phase_rad", "must be non-negative")
        if self.seed is None or int(self.seed) != self.seed:
            raise ParameterError("seed", "an integer seed is required")

    @classmethod
    def none(cls, seed: int = 0) -> "NoiseSpec":
        return cls(0.0, 0.0, seed)


def synthesize(
    spec: Specimen,
    I_rms: float,
    freqs_hz,
    engine: str = "spectral",
    n_max: int = DEFAULT_N_MAX,
    g: float = 0.0,
    grid: GridSpec = GridSpec(),
    include_c_term: bool = False,
    noise: Optional[NoiseSpec] = None,
    workers: int = 1,
) -> SweepDataset:
    """Forward-model a sweep and package it as a dataset.

    Phases are stored as raw lock-in phases. With amplitude noise each point
    carries ``sigma = amplitude_rel * noiseless amplitude``.
    """
    if engine not in ENGINES:
        raise ConfigurationError(f"unknown engine {engine!r}; choose from {ENGINES}")
    noise = NoiseSpec.none() if noise is None else noise
    freqs = np.sort(np.asarray(freqs_hz, dtype=float))
    omegas = 2 * math.pi * freqs
    if engine == "spectral":
        if include_c_term:
            raise ConfigurationError("the self-heating feedback term is only available with the oracle engine")
        ctl = SeriesControl(n_max)
        phasors = [v3w_phasor(spec, Drive(I_rms, float(w)), ctl, g) for w in omegas]
    else:
        phasors = oracle_sweep(spec, I_rms, omegas, grid, include_c_term=include_c_term, g=g, workers=workers)

    amp = np.array([p.amplitude_rms for p in phasors])
    phase = np.array([p.phase for p in phasors])
    rng = np.random.default_rng(noise.seed)
    # draw both blocks unconditionally so each stream is independent of the other's size
    amp_noise = rng.standard_normal(amp.size)
    phase_noise = rng.standard_normal(amp.size)
    noisy_amp = amp * (1 + noise.amplitude_rel * amp_noise)
    noisy_phase = phase + noise.phase_rad * phase_noise
    sigma = noise.amplitude_rel * amp if noise.amplitude_rel > 0 else [None] * amp.size

    points = tuple(
        V3wPoint(freq_hz=float(f), amplitude_rms=float(a), phase_deg=math.degrees(float(p)),
                 sigma=None if s is None else float(s))
        for f, a, p, s in zip(freqs, noisy_amp, noisy_phase, sigma)
    )
    meta = known_to_meta(spec.known(), I_rms)
    meta.update({
        "engine": engine,
        "n_max": str(n_max) if engine == "spectral" else "none",
        "grid_nx": str(grid.nx) if engine == "oracle" else "none",
        "grid_steps_per_period": str(grid.steps_per_period) if engine == "oracle" else "none",
        "include_c_term": str(bool(include_c_term)).lower(),
        "loss_rate_per_s": repr(float(g)),
        "noise_amplitude_rel": repr(float(noise.amplitude_rel)),
        "noise_phase_rad": repr(float(noise.phase_rad)),
        "seed": str(int(noise.seed)),
        "source_kappa_W_per_mK": repr(float(spec.kappa)),
        "source_cp_J_per_kgK": repr(float(spec.cp)),
    })
    return SweepDataset(points=points, known=spec.known(), I_rms=I_rms, meta=meta)


def generate_sweep(config, noise: Optional[NoiseSpec] = None, engine: Optional[str] = None,
                   specimen: Optional[Specimen] = None, I_rms: Optional[float] = None) -> SweepDataset:
    """Build a sweep from a :class:`~threeomega.config.RunConfig`.

    ``noise`` and ``engine`` default to the config's ``[noise]``/``[io] seed``
    and ``[simulation] engine``. ``specimen``/``I_rms`` override the config
    (used by the temperature pipeline). A reduced-frequency grid is laid out
    against the apparent time constant, which is what the response follows.
    """
    sim = config.simulation
    spec = config.specimen.specimen() if specimen is None else specimen
    current = config.drive.current if I_rms is None else I_rms
    if current is None:
        raise ConfigurationError("[drive] current is required")
    if noise is None:
        noise = NoiseSpec(config.noise.amplitude, config.noise.phase, config.io.seed)
    g = loss_rate(spec, sim.loss)
    gamma_ap = spec.gamma / (1 + g * spec.gamma)
    freqs = config.drive.frequency_grid(gamma_ap)
    return synthesize(spec, current, freqs, engine=engine or sim.engine, n_max=sim.n_max, g=g,
                      grid=sim.grid(), include_c_term=sim.include_c_term, noise=noise,
                      workers=config.pipeline.workers)
