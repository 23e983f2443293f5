"""Digital lock-in: rectangular-window quadrature over whole drive periods.

No filtering is applied; over an integer number of periods the inner
products are exact for any periodic signal whose harmonics stay below the
Nyquist limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, WindowError
from .spectral import wrap_phase

MIN_SAMPLES_PER_PERIOD = 8


@dataclass(frozen=True)
class Demodulated:
    harmonic: int
    amplitude_rms: float
    phase: float  # radians in (-pi, pi], relative to sin(omega t)


def demodulate(trace, omega: float, k: int = 3, values=None) -> Demodulated:
    """Extract the rms amplitude and phase of harmonic ``k``.

    Parameters
    ----------
    trace : TraceResult or array_like
        Either an object with ``times`` and ``voltage`` attributes, or the
        sample times themselves (then ``values`` must be given).
    omega : float
        Fundamental angular frequency, rad/s. Phase zero is ``sin(omega t)``.
    k : int
        Harmonic index.
    values : array_like, optional
        Sampled signal when ``trace`` is a time array.

    Returns
    -------
    Demodulated
        ``A sin(k omega t + theta)`` yields ``amplitude_rms = A / sqrt(2)`` and
        ``phase = theta``.
    """
    if values is None:
        times, values = trace.times, trace.voltage
    else:
        times = trace
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1 or t.size < 2:
        raise WindowError("times and values must be equal-length 1-D arrays")
    if k < 1:
        raise ValueError("harmonic index must be >= 1")

    step = (t[-1] - t[0]) / (t.size - 1)
    if not np.allclose(np.diff(t), step, rtol=1e-6, atol=0):
        raise WindowError("sampling must be uniform")
    period = 2 * math.pi / omega
    spp = period / step
    n_periods = t.size * step / period
    if abs(n_periods - round(n_periods)) > 1e-6 * max(1.0, n_periods) or round(n_periods) < 1:
        raise WindowError(f"window spans {n_periods:.6f} periods, need a whole number >= 1")
    if spp < max(MIN_SAMPLES_PER_PERIOD, 2 * k + 1):
        raise AliasingError(f"{spp:.2f} samples per period is too coarse for harmonic {k}")

    arg = k * omega * t
    x = 2 * np.mean(v * np.sin(arg))
    y = 2 * np.mean(v * np.cos(arg))
    return Demodulated(harmonic=k, amplitude_rms=math.hypot(x, y) / math.sqrt(2), phase=wrap_phase(math.atan2(y, x)))


def fold_phase(phase, rprime: float):
    """Convert a lock-in 3-omega phase into the thermal lag ``phi`` (tan phi = 2 omega gamma).

    The lock-in shows ``pi - phi`` when R' > 0 and ``-phi`` when R' < 0.
    """
    phase = np.asarray(phase, dtype=float)
    phi = np.pi - phase if rprime > 0 else -phase
    return wrap_phase(phi)


def unfold_phase(phi, rprime: float):
    """Inverse of :func:`fold_phase`."""
    phi = np.asarray(phi, dtype=float)
    return wrap_phase(np.pi - phi if rprime > 0 else -phi)
