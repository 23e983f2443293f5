"""Exact Fourier-series solution of the ac-heated, end-clamped rod.

Each odd spatial mode ``n`` relaxes at the rate ``n^2/gamma + g`` and is
driven by the ``sin^2(omega t)`` heating. The temperature, the averaged
resistance and the third-harmonic voltage are all sums over these modes.
Even modes are absent because the uniform heating projects only onto odd
modes.

Phasors use the sine convention: ``A sin(3 omega t + theta)`` is stored as
the complex number ``A exp(i theta)``, so the reported phase is what a
lock-in referenced to the current would show.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Drive, Specimen, derive_thermal, heating_rate
from .errors import ParameterError

DEFAULT_N_MAX = 99
# odd zeta sums used by the limit forms
ODD_ZETA_4 = math.pi**4 / 96
ODD_ZETA_2 = math.pi**2 / 8


@dataclass(frozen=True)
class SeriesControl:
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ParameterError("n_max", f"must be an integer >= 1, got {self.n_max!r}")

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.n_max + 1, 2, dtype=float)


@dataclass(frozen=True)
class Phasor3w:
    amplitude_rms: float
    phase: float

    @property
    def complex_peak(self) -> complex:
        """Peak phasor ``A exp(i phase)`` in the sine convention."""
        return math.sqrt(2) * self.amplitude_rms * complex(math.cos(self.phase), math.sin(self.phase))


def wrap_phase(phase):
    """Map angles into (-pi, pi]."""
    wrapped = np.mod(np.asarray(phase, dtype=float) + np.pi, 2 * np.pi) - np.pi
    wrapped = np.where(wrapped <= -np.pi, wrapped + 2 * np.pi, wrapped)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


def _phasor_from_complex(z: complex) -> Phasor3w:
    return Phasor3w(amplitude_rms=abs(z) / math.sqrt(2), phase=wrap_phase(np.angle(z)))


def _rates(spec: Specimen, n: np.ndarray, g: float) -> np.ndarray:
    if g < 0:
        raise ParameterError("g", "loss rate must be non-negative")
    return n**2 / spec.gamma + g


def temperature_profile(spec: Specimen, drive: Drive, x, t, ctl: SeriesControl = SeriesControl(), g: float = 0.0):
    """Temperature rise above ``T0`` at positions ``x`` and times ``t`` (broadcast).

    Steady periodic state of the linearised rod with optional linear loss ``g``.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    tol = 1e-12 * spec.L
    if np.any(x < -tol) or np.any(x > spec.L + tol):
        raise ParameterError("x", f"position outside [0, L={spec.L}]")
    n = ctl.modes
    lam = _rates(spec, n, g)
    b = heating_rate(spec, drive)
    w2 = 2 * drive.omega
    xs, ts = np.broadcast_arrays(x, t)
    osc = np.exp(1j * w2 * ts[..., None])
    amp = 2 * b / (n * math.pi)
    bracket = 1 / lam - np.real(osc / (lam + 1j * w2))
    shape = np.sin(n * math.pi * xs[..., None] / spec.L)
    out = np.sum(amp * shape * bracket, axis=-1)
    return float(out) if out.ndim == 0 else out


def resistance_fluctuation(spec: Specimen, drive: Drive, t, ctl: SeriesControl = SeriesControl(), g: float = 0.0):
    """Resistance change ``(R'/L) * integral of the temperature rise`` at times ``t``."""
    t = np.asarray(t, dtype=float)
    n = ctl.modes
    lam = _rates(spec, n, g)
    b = heating_rate(spec, drive)
    w2 = 2 * drive.omega
    coef = 4 * b / (n**2 * math.pi**2)
    bracket = 1 / lam - np.real(np.exp(1j * w2 * t[..., None]) / (lam + 1j * w2))
    out = spec.Rprime * np.sum(coef * bracket, axis=-1)
    return float(out) if out.ndim == 0 else out


def v3w_complex(spec: Specimen, drive: Drive, ctl: SeriesControl = SeriesControl(), g: float = 0.0) -> complex:
    """Peak complex 3-omega voltage, sine convention.

    ``-(2 I0 R' b / pi^2) * sum_odd 1 / (n^2 (n^2/gamma + g + 2 i omega))``
    """
    n = ctl.modes
    lam = _rates(spec, n, g)
    b = heating_rate(spec, drive)
    total = np.sum(1.0 / (n**2 * (lam + 2j * drive.omega)))
    return complex(-2 * drive.I0 * spec.Rprime * b / math.pi**2 * total)


def v3w_phasor(spec: Specimen, drive: Drive, ctl: SeriesControl = SeriesControl(), g: float = 0.0) -> Phasor3w:
    """rms amplitude and lock-in phase of the third harmonic, summed over modes."""
    return _phasor_from_complex(v3w_complex(spec, drive, ctl, g))


def first_term_amplitude(spec: Specimen, drive: Drive) -> float:
    """``4 I^3 L R |R'| / (pi^4 kappa S sqrt(1 + (2 omega gamma)^2))`` with rms current."""
    x = 2 * drive.omega * spec.gamma
    return v3w_low_freq_limit(spec, drive) / math.sqrt(1 + x * x)


def v3w_first_term(spec: Specimen, drive: Drive) -> Phasor3w:
    """Closed form of the fundamental mode alone.

    The phase lag ``phi = atan(2 omega gamma)`` appears as ``pi - phi`` for
    R' > 0 and ``-phi`` for R' < 0.
    """
    phi = math.atan(2 * drive.omega * spec.gamma)
    phase = math.pi - phi if spec.Rprime > 0 else -phi
    return Phasor3w(first_term_amplitude(spec, drive), wrap_phase(phase))


def v3w_low_freq_limit(spec: Specimen, drive: Drive) -> float:
    """Fundamental-mode amplitude for omega -> 0: ``4 I^3 R |R'| L / (pi^4 kappa S)``.

    Equal to ``I |R'| delta0 / pi``. The full series exceeds it by the factor
    ``pi^4/96``.
    """
    I = drive.I_rms
    return 4 * I**3 * spec.R * abs(spec.Rprime) * spec.L / (math.pi**4 * spec.kappa * spec.S)


def v3w_high_freq_limit(spec: Specimen, drive: Drive, truncated: bool = False) -> float:
    """Amplitude for omega gamma -> infinity: ``I^3 R |R'| / (4 omega rho cp L S)``.

    With ``truncated=True`` the coefficient 1/4 becomes 2/pi^2, which is what the
    fundamental mode alone tends to.
    """
    coef = 2 / math.pi**2 if truncated else 0.25
    I = drive.I_rms
    return coef * I**3 * spec.R * abs(spec.Rprime) / (drive.omega * spec.rho * spec.cp * spec.L * spec.S)


def dc_center_temperature(spec: Specimen, drive: Drive) -> float:
    """Time-averaged temperature rise at mid-span, ``delta0 * pi^3 / 32``."""
    return derive_thermal(spec, drive).delta0 * math.pi**3 / 32


@dataclass(frozen=True)
class ErrorCurves:
    """Normalised truncation-error table versus reduced frequency ``2 omega gamma``.

    ``full`` is the series amplitude, ``first`` the fundamental alone; both are
    divided by the zero-frequency value of ``first``.
    """

    reduced_freq: np.ndarray
    full: np.ndarray
    first: np.ndarray
    n_max: int

    @property
    def difference(self) -> np.ndarray:
        return self.full - self.first

    @property
    def relative(self) -> np.ndarray:
        return self.difference / self.full

    def rows(self):
        for row in zip(self.reduced_freq, self.full, self.first, self.difference, self.relative):
            yield tuple(float(v) for v in row)


def normalized_series_amplitude(reduced_freq, n_max: int = DEFAULT_N_MAX):
    """``|sum_odd n^-4 / (1 + i x / n^2)|`` for reduced frequency ``x = 2 omega gamma``."""
    x = np.asarray(reduced_freq, dtype=float)
    n = SeriesControl(n_max).modes
    return np.abs(np.sum(n**-4 / (1 + 1j * x[..., None] / n**2), axis=-1))


def error_curves(reduced_freq, n_max: int = DEFAULT_N_MAX) -> ErrorCurves:
    """Tabulate full-series and first-term amplitudes on a grid of ``2 omega gamma``."""
    x = np.asarray(reduced_freq, dtype=float)
    if np.any(x < 0):
        raise ParameterError("reduced_freq", "grid values must be >= 0")
    full = normalized_series_amplitude(x, n_max)
    first = 1 / np.sqrt(1 + x**2)
    return ErrorCurves(reduced_freq=x, full=full, first=first, n_max=n_max)
