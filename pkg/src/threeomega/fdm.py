"""Brute-force time-domain solver of the rod heat equation.

Integrates

    dT/dt - alpha d2T/dx2 + (g - c s(t)) T = b s(t),   T(0) = T(L) = 0,

with ``s(t) = sin^2(omega t)`` (or 1 for a dc drive) from a cold start until
the response is periodic. Space uses second-order central differences on
``nx`` interior nodes, time the Crank-Nicolson rule. The first two steps are
replaced by four backward-Euler half steps so the stiff high-wavenumber
modes excited by the cold start are damped instead of ringing.

This module deliberately shares nothing with :mod:`threeomega.spectral`
beyond the parameter types, so it can serve as an independent check.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from .core import Drive, Specimen, feedback_rate, heating_rate
from .errors import ConvergenceError, ParameterError
from .lockin import demodulate
from .spectral import Phasor3w

STARTUP_HALF_STEPS = 4


@dataclass(frozen=True)
class GridSpec:
    """Discretisation controls. ``None`` fields are resolved per run by :meth:`resolve`."""

    nx: int = 129
    dt: Optional[float] = None
    n_periods: Optional[int] = None
    settle_periods: Optional[int] = None
    steps_per_period: int = 512
    samples_per_period: int = 64
    defect_tol: float = 1e-6

    def resolve(self, spec: Specimen, drive: Drive, g: float = 0.0) -> "GridSpec":
        period = drive.period
        steps = self.steps_per_period
        if self.dt is not None:
            ratio = period / self.dt
            steps = int(round(ratio))
            if abs(ratio - steps) > 1e-9 * ratio:
                raise ParameterError("dt", "must divide the drive period into a whole number of steps")
        if steps % self.samples_per_period:
            raise ParameterError("dt", f"{steps} steps per period not divisible by {self.samples_per_period} samples")
        settle = self.settle_periods
        if settle is None:
            # slowest mode decays at 1/gamma + g; wait until its transient is 1e-3 * tol
            tau = 1.0 / (1.0 / spec.gamma + g)
            settle = max(1, math.ceil(tau * math.log(1e3 / self.defect_tol) / period))
        n_periods = self.n_periods if self.n_periods is not None else settle + 2
        out = replace(self, dt=period / steps, steps_per_period=steps, settle_periods=settle, n_periods=n_periods)
        out.validate()
        return out

    def validate(self):
        if self.nx < 16:
            raise ParameterError("nx", "need at least 16 interior nodes")
        if self.dt is not None and not self.dt > 0:
            raise ParameterError("dt", "must be positive")
        if self.settle_periods is not None and self.settle_periods < 1:
            raise ParameterError("settle_periods", "must be >= 1")
        if self.n_periods is not None and self.settle_periods is not None and self.n_periods <= self.settle_periods:
            raise ParameterError("n_periods", "must exceed settle_periods")
        if self.samples_per_period < 8:
            raise ParameterError("samples_per_period", "need at least 8")
        if not self.defect_tol > 0:
            raise ParameterError("defect_tol", "must be positive")


@dataclass(frozen=True)
class TraceResult:
    times: np.ndarray
    dR: np.ndarray
    voltage: np.ndarray
    center_temp: np.ndarray
    x: np.ndarray
    profiles: np.ndarray  # (n_samples, nx + 2) including the clamped ends
    defect: float
    omega: float
    grid: GridSpec
    meta: dict = field(default_factory=dict)

    def to_rows(self):
        for row in zip(self.times, self.voltage, self.dR, self.center_temp):
            yield tuple(float(v) for v in row)


def _laplacian_banded(nx: int, coef: float, dt_half: float, diag_extra: float) -> np.ndarray:
    """Banded form of ``I - dt_half * (coef * D2 + diag_extra)``."""
    ab = np.empty((3, nx))
    ab[0, 0] = 0.0
    ab[0, 1:] = -dt_half * coef
    ab[1, :] = 1.0 + dt_half * (2.0 * coef - diag_extra)
    ab[2, :-1] = -dt_half * coef
    ab[2, -1] = 0.0
    return ab


def _apply(u: np.ndarray, coef: float, diag: float) -> np.ndarray:
    """``(coef * D2 + diag) u`` with homogeneous Dirichlet ends."""
    out = (diag - 2.0 * coef) * u
    out[1:] += coef * u[:-1]
    out[:-1] += coef * u[1:]
    return out


def _integrate(u, t0, dt, nsteps, coef, g, b, c, omega, dc, startup, on_step=None):
    """Advance ``u`` by ``nsteps`` steps; ``on_step(i, u)`` sees the state after step i."""
    nx = u.size

    def s(t):
        return 1.0 if dc else math.sin(omega * t) ** 2

    varying = c != 0.0 and not dc
    fixed_ab = None if varying else _laplacian_banded(nx, coef, 0.5 * dt, -g + (c if dc else 0.0))
    t = t0
    for i in range(nsteps):
        if startup and i < STARTUP_HALF_STEPS // 2:
            h = 0.5 * dt
            for _ in range(2):
                t_new = t + h
                ab = _laplacian_banded(nx, coef, h, -g + c * s(t_new))
                u = solve_banded((1, 1), ab, u + h * b * s(t_new), overwrite_b=True, check_finite=False)
                t = t_new
        else:
            t_new = t0 + (i + 1) * dt
            s0, s1 = s(t), s(t_new)
            rhs = u + 0.5 * dt * (_apply(u, coef, -g + c * s0) + b * (s0 + s1))
            ab = _laplacian_banded(nx, coef, 0.5 * dt, -g + c * s1) if varying else fixed_ab
            u = solve_banded((1, 1), ab, rhs, overwrite_b=True, check_finite=False)
            t = t_new
        if on_step is not None:
            on_step(i, u)
    return u


def solve(
    spec: Specimen,
    drive: Drive,
    grid: GridSpec = GridSpec(),
    include_c_term: bool = False,
    g: float = 0.0,
    dc: bool = False,
) -> TraceResult:
    """Integrate from a cold start and sample the post-settle window.

    Raises
    ------
    ConvergenceError
        If the last two simulated periods of the resistance trace differ by
        more than ``grid.defect_tol`` relative.
    """
    if g < 0:
        raise ParameterError("g", "loss rate must be non-negative")
    grid = grid.resolve(spec, drive, g)
    nx = grid.nx
    h = spec.L / (nx + 1)
    x = np.linspace(0.0, spec.L, nx + 2)
    coef = spec.alpha / h**2
    b = heating_rate(spec, drive)
    c = feedback_rate(spec, drive) if include_c_term else 0.0
    steps = grid.steps_per_period
    stride = steps // grid.samples_per_period
    total = grid.n_periods * steps
    first_sample = grid.settle_periods * steps
    mid = nx // 2

    n_all = grid.n_periods * grid.samples_per_period
    dR_all = np.zeros(n_all)
    profiles = np.zeros((n_all - grid.settle_periods * grid.samples_per_period, nx + 2))

    def record(i, u):
        step = i + 1
        if step % stride:
            return
        k = step // stride
        dR_all[k] = spec.Rprime * h * u.sum() / spec.L
        if step >= first_sample:
            profiles[k - grid.settle_periods * grid.samples_per_period, 1:-1] = u

    u0 = np.zeros(nx)
    _integrate(u0, 0.0, grid.dt, total - stride, coef, g, b, c, drive.omega, dc, True, record)

    spp = grid.samples_per_period
    defect = 0.0
    if grid.n_periods >= 2:
        last, prev = dR_all[-spp:], dR_all[-2 * spp : -spp]
        # ac: relative to the oscillation, which carries the 3-omega signal; dc: to the level
        scale = np.max(np.abs(last)) if dc else np.ptp(last)
        defect = float(np.max(np.abs(last - prev)) / scale) if scale > 0 else 0.0
        if defect > grid.defect_tol:
            raise ConvergenceError(f"no periodic state after {grid.n_periods} periods", defect)

    start = grid.settle_periods * spp
    times = np.arange(start, n_all) * stride * grid.dt
    dR = dR_all[start:]
    center = profiles[:, mid + 1] if nx % 2 else 0.5 * (profiles[:, mid] + profiles[:, mid + 1])
    wave = 1.0 if dc else np.sin(drive.omega * times)
    voltage = drive.I0 * wave * (spec.R + dR)
    meta = {"nx": nx, "dt": grid.dt, "n_periods": grid.n_periods, "settle_periods": grid.settle_periods,
            "include_c_term": include_c_term, "g": g, "dc": dc}
    return TraceResult(times=times, dR=dR, voltage=voltage, center_temp=center, x=x, profiles=profiles,
                       defect=defect, omega=drive.omega, grid=grid, meta=meta)


def oracle_phasor(spec: Specimen, drive: Drive, grid: GridSpec = GridSpec(),
                  include_c_term: bool = False, g: float = 0.0) -> Phasor3w:
    """Third harmonic of the simulated voltage, demodulated like a lock-in."""
    trace = solve(spec, drive, grid, include_c_term=include_c_term, g=g)
    d = demodulate(trace, drive.omega, 3)
    return Phasor3w(d.amplitude_rms, d.phase)


def _phasor_job(args):
    index, spec, drive, grid, include_c_term, g = args
    try:
        return oracle_phasor(spec, drive, grid, include_c_term, g)
    except ConvergenceError as exc:
        raise ConvergenceError(f"frequency #{index} ({drive.frequency:.6g} Hz): {exc}", exc.defect) from None


def oracle_sweep(spec: Specimen, I_rms: float, omegas, grid: GridSpec = GridSpec(),
                 include_c_term: bool = False, g: float = 0.0, workers: int = 1) -> list:
    """:func:`oracle_phasor` over many frequencies; results keep input order."""
    jobs = [(i, spec, Drive(I_rms, float(w)), grid, include_c_term, g) for i, w in enumerate(omegas)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_phasor_job, jobs))
    return [_phasor_job(j) for j in jobs]


def apparent_from_oracle(spec: Specimen, I_rms: float, grid: GridSpec = GridSpec(), g: float = 0.0,
                         reduced_freq=None, model: str = "offset", workers: int = 1):
    """Simulate a lossy sweep, demodulate it and fit it as if there were no loss.

    The frequencies are placed at ``reduced_freq`` (default 41 uniform points
    up to 4) in units of the apparent time constant ``gamma / (1 + g gamma)``.

    Returns
    -------
    tuple
        ``(kappa_ap, gamma_ap, fit)`` where ``fit`` is the full
        :class:`~threeomega.fitting.FitResult`.
    """
    from .fitting import SweepDataset, V3wPoint, fit_amplitude

    if reduced_freq is None:
        reduced_freq = np.linspace(4 / 41, 4, 41)
    gamma_ap = spec.gamma / (1 + g * spec.gamma)
    omegas = np.asarray(reduced_freq, dtype=float) / (2 * gamma_ap)
    phasors = oracle_sweep(spec, I_rms, omegas, grid, g=g, workers=workers)
    points = [V3wPoint(freq_hz=float(w / (2 * math.pi)), amplitude_rms=p.amplitude_rms,
                       phase_deg=math.degrees(p.phase)) for w, p in zip(omegas, phasors)]
    data = SweepDataset(points=tuple(points), known=spec.known(), I_rms=I_rms)
    fit = fit_amplitude(data, model=model)
    return fit.kappa, fit.gamma, fit


def switch_off_decay(spec: Specimen, nx: int = 129, duration: Optional[float] = None,
                     dt: Optional[float] = None, samples: int = 200):
    """Relax the dc-heated rod with the heater off and track the fundamental mode.

    Starts from the discrete steady profile under uniform heating. Returns the
    sample times and the amplitude of ``sin(pi x / L)`` in the profile.
    """
    gamma = spec.gamma
    duration = 5 * gamma if duration is None else duration
    dt = gamma / 400 if dt is None else dt
    h = spec.L / (nx + 1)
    xi = np.linspace(0.0, spec.L, nx + 2)[1:-1]
    coef = spec.alpha / h**2
    # discrete steady state of -alpha D2 u = 1 (any scale works for a decay rate)
    ab = _laplacian_banded(nx, coef, 1.0, 0.0)
    ab[1, :] -= 1.0
    u = solve_banded((1, 1), ab, np.ones(nx))
    basis = np.sin(np.pi * xi / spec.L) * 2 * h / spec.L
    nsteps = int(round(duration / dt))
    stride = max(1, nsteps // samples)
    times, amps = [0.0], [float(basis @ u)]

    def record(i, v):
        if (i + 1) % stride == 0:
            times.append((i + 1) * dt)
            amps.append(float(basis @ v))

    _integrate(u, 0.0, dt, nsteps, coef, 0.0, 0.0, 0.0, 1.0, True, True, record)
    return np.array(times), np.array(amps)
