"""Recover thermal conductivity and time constant from 3-omega frequency sweeps.

Two amplitude models are available, both written as ``K / kappa * shape(2 omega gamma)``
with ``K = 4 I^3 L R |R'| / (pi^4 S)``:

``first_term``
    ``shape(x) = 1 / sqrt(1 + x^2)``, the fundamental mode alone.
``offset``
    ``shape(x) = (1 / sqrt(1 + x^2) + 0.01) / 1.01``, the fundamental shifted
    upwards to absorb the nearly constant contribution of the higher modes.
    Meant for ``2 omega gamma <= 4``.

Fits run in ``(log kappa, log gamma)`` so both stay positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import SIGMA_SB, KnownProperties, Thresholds
from .errors import FitDegeneracyError, FitError, InputError, ParameterError
from .lockin import fold_phase
from .optimize import levenberg_marquardt

MODELS = ("first_term", "offset")
OFFSET = 0.01
DEFAULT_WINDOW = 4.0
MIN_POINTS = 4
# |d ln V / d ln gamma| below this everywhere means gamma is not identifiable
MIN_GAMMA_SENSITIVITY = 1e-3


@dataclass(frozen=True)
class V3wPoint:
    """One lock-in reading, stored in the instrument's units (Hz, V rms, degrees).

    ``phase_deg`` is the raw lock-in phase relative to the 1-omega reference.
    """

    freq_hz: float
    amplitude_rms: float
    phase_deg: Optional[float] = None
    sigma: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.freq_hz) and self.freq_hz > 0):
            raise ParameterError("freq_hz", f"must be positive, got {self.freq_hz!r}")
        if not (math.isfinite(self.amplitude_rms) and self.amplitude_rms > 0):
            raise ParameterError("amplitude_rms", f"must be positive, got {self.amplitude_rms!r}")
        if self.sigma is not None and not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ParameterError("sigma", f"must be positive, got {self.sigma!r}")
        if self.phase_deg is not None and not math.isfinite(self.phase_deg):
            raise ParameterError("phase_deg", "must be finite")

    @property
    def omega(self) -> float:
        return 2 * math.pi * self.freq_hz

    @property
    def phase(self) -> Optional[float]:
        return None if self.phase_deg is None else math.radians(self.phase_deg)


@dataclass(frozen=True)
class SweepDataset:
    points: tuple
    known: KnownProperties
    I_rms: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.I_rms > 0:
            raise ParameterError("I_rms", "must be positive")
        f = [p.freq_hz for p in self.points]
        if any(b <= a for a, b in zip(f, f[1:])):
            raise InputError("frequencies must be strictly increasing")

    @property
    def T0(self) -> float:
        return self.known.T0

    @property
    def omegas(self) -> np.ndarray:
        return np.array([p.omega for p in self.points])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([p.amplitude_rms for p in self.points])

    @property
    def has_phase(self) -> bool:
        return bool(self.points) and all(p.phase_deg is not None for p in self.points)

    @property
    def phases(self) -> np.ndarray:
        if not self.has_phase:
            raise InputError("dataset has no phase column")
        return np.array([p.phase for p in self.points])

    @property
    def sigmas(self) -> Optional[np.ndarray]:
        if self.points and all(p.sigma is not None for p in self.points):
            return np.array([p.sigma for p in self.points])
        return None

    def amplitude_scale(self) -> float:
        """``K`` such that the zero-frequency first-term amplitude is ``K / kappa``."""
        k = self.known
        return 4 * self.I_rms**3 * k.L * k.R * abs(k.Rprime) / (math.pi**4 * k.S)


@dataclass(frozen=True)
class FitResult:
    kappa: float
    gamma: float
    cp: float
    kappa_se: float
    gamma_se: float
    residual_norm: float
    model: str
    freq_window: tuple  # (min, max) of 2 omega gamma over the points used
    n_points: int
    iterations: int
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def report(self) -> dict:
        """Flat key/value view for text reports."""
        out = {
            "model": self.model,
            "kappa_W_per_mK": self.kappa,
            "kappa_se": self.kappa_se,
            "gamma_s": self.gamma,
            "gamma_se": self.gamma_se,
            "cp_J_per_kgK": self.cp,
            "residual_norm": self.residual_norm,
            "reduced_freq_min": self.freq_window[0],
            "reduced_freq_max": self.freq_window[1],
            "n_points": self.n_points,
            "iterations": self.iterations,
            "converged": self.converged,
        }
        out.update(self.diagnostics)
        return out


def model_shape(x, model: str):
    """Shape factor and ``x * d shape / dx`` for reduced frequency ``x``."""
    x = np.asarray(x, dtype=float)
    root = np.sqrt(1 + x * x)
    if model == "first_term":
        return 1 / root, -(x * x) / root**3
    if model == "offset":
        return (1 / root + OFFSET) / (1 + OFFSET), -(x * x) / root**3 / (1 + OFFSET)
    raise ParameterError("model", f"unknown model {model!r}; choose from {MODELS}")


def model_amplitude(omega, kappa: float, gamma: float, scale: float, model: str = "first_term"):
    """Predicted rms amplitude ``scale / kappa * shape(2 omega gamma)``."""
    shape, _ = model_shape(2 * np.asarray(omega) * gamma, model)
    return scale / kappa * shape


def specific_heat(kappa: float, gamma: float, rho: float, L: float) -> float:
    """``cp = pi^2 gamma kappa / (rho L^2)``.

    The same relation holds for the apparent pair ``((1 + g gamma) kappa,
    gamma / (1 + g gamma))``, so radial loss drops out of cp.
    """
    return math.pi**2 * gamma * kappa / (rho * L**2)


def _initial_guess(omega, amp, scale):
    order = np.argsort(omega)
    omega, amp = omega[order], amp[order]
    plateau = amp[0]
    kappa0 = scale / plateau
    ratio = amp / plateau
    if np.min(ratio) > 1 - 1e-6:
        raise FitDegeneracyError("amplitudes are flat across the sweep; gamma is unidentifiable")
    i = int(np.argmin(np.abs(ratio - 1 / math.sqrt(2))))
    r = min(ratio[i], 1 - 1e-6)
    x = math.sqrt(1 / r**2 - 1)
    gamma0 = x / (2 * omega[i])
    return kappa0, gamma0


def _fit_once(omega, amp, weights, scale, model, p0, absolute_sigma):
    sw = np.sqrt(weights)
    norm = np.max(np.abs(amp * sw))

    def residual(p):
        shape, _ = model_shape(2 * omega * math.exp(p[1]), model)
        return sw * (amp - scale * math.exp(-p[0]) * shape) / norm

    def jacobian(p):
        shape, dshape = model_shape(2 * omega * math.exp(p[1]), model)
        m = scale * math.exp(-p[0])
        # residual = sw (amp - m shape) / norm
        return np.column_stack((sw * m * shape / norm, -sw * m * dshape / norm))

    res = levenberg_marquardt(residual, jacobian, p0)
    if not np.all(np.isfinite(res.params)):
        raise FitError("fit diverged")

    J = res.jacobian * norm
    r = res.residuals * norm
    Jn = J / np.linalg.norm(J, axis=0)
    sv = np.linalg.svd(Jn, compute_uv=False)
    if sv[-1] < 1e-8 * sv[0]:
        raise FitDegeneracyError("Jacobian is singular; kappa and gamma cannot be separated")
    cov = np.linalg.inv(J.T @ J)
    if not absolute_sigma:
        dof = max(len(amp) - 2, 1)
        cov = cov * (r @ r) / dof
    return res, cov


def fit_amplitude(
    data: SweepDataset,
    model: str = "offset",
    window: Optional[float] = DEFAULT_WINDOW,
    max_rounds: int = 5,
    thresholds: Thresholds = Thresholds(),
) -> FitResult:
    """Least-squares fit of (kappa, gamma) to the sweep amplitudes.

    Only points with ``2 omega gamma <= window`` enter the fit. Because gamma is
    what is being fitted, the selection is repeated with the latest estimate
    until it stops changing (at most ``max_rounds`` times). ``window=None``
    uses every point.

    Points are weighted by ``1 / sigma^2`` when every point carries a sigma.
    """
    model_shape(0.0, model)
    omega_all = data.omegas
    amp_all = data.amplitudes
    sig = data.sigmas
    w_all = np.ones_like(amp_all) if sig is None else 1 / sig**2
    scale = data.amplitude_scale()
    if len(amp_all) < MIN_POINTS:
        raise InputError(f"need at least {MIN_POINTS} points, got {len(amp_all)}")

    kappa0, gamma0 = _initial_guess(omega_all, amp_all, scale)
    p = np.array([math.log(kappa0), math.log(gamma0)])
    selected = None
    for _ in range(max_rounds):
        gamma_est = math.exp(p[1])
        if window is None:
            mask = np.ones(len(amp_all), dtype=bool)
        else:
            mask = 2 * omega_all * gamma_est <= window * (1 + 1e-9)
        if selected is not None and np.array_equal(mask, selected):
            break
        if mask.sum() < MIN_POINTS:
            raise FitDegeneracyError(
                f"only {int(mask.sum())} points inside 2*omega*gamma <= {window}; extend the sweep to lower frequency"
            )
        omega, amp, w = omega_all[mask], amp_all[mask], w_all[mask]
        sens = (2 * omega * gamma_est) ** 2 / (1 + (2 * omega * gamma_est) ** 2)
        if np.max(sens) < MIN_GAMMA_SENSITIVITY:
            raise FitDegeneracyError("all points lie on the low-frequency plateau; gamma is unidentifiable")
        res, cov = _fit_once(omega, amp, w, scale, model, p, sig is not None)
        p = res.params
        selected = mask

    kappa, gamma = math.exp(p[0]), math.exp(p[1])
    fitted = model_amplitude(omega, kappa, gamma, scale, model)
    rel = (amp - fitted) / amp
    x = 2 * omega * gamma
    cp = specific_heat(kappa, gamma, data.known.rho, data.known.L)
    return FitResult(
        kappa=kappa,
        gamma=gamma,
        cp=cp,
        kappa_se=kappa * math.sqrt(max(cov[0, 0], 0.0)),
        gamma_se=gamma * math.sqrt(max(cov[1, 1], 0.0)),
        residual_norm=float(np.sqrt(np.mean(rel**2))),
        model=model,
        freq_window=(float(x.min()), float(x.max())),
        n_points=int(len(amp)),
        iterations=res.iterations,
        converged=res.converged,
        diagnostics=fit_diagnostics(data, kappa, gamma, cp, thresholds),
    )


def fit_diagnostics(data: SweepDataset, kappa: float, gamma: float, cp: float,
                    thresholds: Thresholds = Thresholds()) -> dict:
    """Validity ratios evaluated at the fitted parameters."""
    k = data.known
    I0sq = 2 * data.I_rms**2
    heating = I0sq * abs(k.Rprime) * k.L / (math.pi**2 * kappa * k.S)
    out = {"self_heating_ratio": heating, "self_heating_status": thresholds.classify(heating)}
    g = 0.0
    have_loss = False
    if k.D is not None and k.emissivity is not None:
        g += 16 * k.emissivity * SIGMA_SB * k.T0**3 / (k.rho * cp * k.D)
        have_loss = True
    if k.D is not None and k.eta is not None:
        g += 4 * k.eta / (k.rho * cp * k.D)
        have_loss = True
    if have_loss:
        out["loss_rate_per_s"] = g
        out["radial_loss_ratio"] = g * gamma
        out["radial_loss_status"] = thresholds.classify(g * gamma)
    return out


@dataclass(frozen=True)
class PhaseFit:
    gamma: float
    gamma_se: float
    n_points: int
    reduced_freq_max: float
    biased: bool  # True when the fit reaches beyond 2 omega gamma = 4


def fit_phase(data: SweepDataset, window: Optional[float] = None, max_rounds: int = 5) -> PhaseFit:
    """Fit ``tan(phi) = 2 omega gamma`` through the origin.

    Phases are folded with the sign of R' first. High-frequency points pull
    the slope down because the higher modes bend ``tan(phi)`` below the line,
    so ``biased`` is set whenever the points used extend past ``2 omega gamma = 4``.
    """
    if not data.has_phase:
        raise InputError("phase fit needs a phase column")
    omega_all = data.omegas
    tan_all = np.tan(fold_phase(data.phases, data.known.Rprime))
    mask = np.ones(len(omega_all), dtype=bool)
    gamma = se = math.nan
    for _ in range(max_rounds):
        x, y = 2 * omega_all[mask], tan_all[mask]
        if len(x) < 2:
            raise InputError("need at least two phase points inside the window")
        gamma = float(x @ y / (x @ x))
        resid = y - gamma * x
        se = float(math.sqrt((resid @ resid) / max(len(x) - 1, 1) / (x @ x)))
        if window is None:
            break
        new = 2 * omega_all * gamma <= window * (1 + 1e-9)
        if np.array_equal(new, mask):
            break
        mask = new
    xmax = float(2 * omega_all[mask].max() * gamma)
    return PhaseFit(gamma=gamma, gamma_se=se, n_points=int(mask.sum()), reduced_freq_max=xmax, biased=xmax > DEFAULT_WINDOW)


def apparent_params(kappa: float, gamma: float, g: float):
    """Parameters a loss-free fit reports when a linear radial loss ``g`` is present.

    Returns ``((1 + g gamma) kappa, gamma / (1 + g gamma), 1 / (1 + g gamma))``;
    the last entry is the ratio of apparent to true dc temperature scale.
    """
    if g < 0:
        raise ParameterError("g", "loss rate must be non-negative")
    f = 1 + g * gamma
    return kappa * f, gamma / f, 1 / f


def apparent_kappa_radiation(kappa: float, L: float, D: float, T0: float, emissivity: float) -> float:
    """Apparent conductivity of a radiating cylinder: ``kappa + 16 eps sigma T0^3 L^2 / (pi^2 D)``."""
    return kappa + 16 * emissivity * SIGMA_SB * T0**3 * L**2 / (math.pi**2 * D)


def wiedemann_franz(kappa: float, R: float, L: float, S: float, T: float) -> float:
    """Lorenz ratio ``kappa rho_e / T`` with ``rho_e = R S / L``, in W Ohm / K^2."""
    return kappa * (R * S / L) / T
