"""Specimen and drive types, derived thermal quantities and validity checks.

Everything is strict SI: metres, kilograms, seconds, kelvin, amperes, ohms.
Unit conversion happens only at the config/CLI boundary (see ``units``).
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError, ParameterError

SIGMA_SB = 5.67e-8  # Stefan-Boltzmann constant, W/(m^2 K^4)
LORENZ_FREE_ELECTRON = 2.45e-8  # W Ohm / K^2

# relative mismatch between S and pi D^2/4 that triggers a warning
CYLINDER_AREA_RTOL = 0.05


def _positive(obj, *names):
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ParameterError(name, f"must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class Specimen:
    """A suspended rod or filament, linearised about the substrate temperature ``T0``.

    ``Rprime`` is dR/dT at ``T0`` and may be negative, but not zero.
    ``D``, ``emissivity`` and ``eta`` are only needed for radial heat-loss estimates.
    """

    L: float
    S: float
    rho: float
    cp: float
    kappa: float
    R: float
    Rprime: float
    T0: float
    D: Optional[float] = None
    emissivity: Optional[float] = None
    eta: Optional[float] = None

    def __post_init__(self):
        _positive(self, "L", "S", "rho", "cp", "kappa", "R", "T0")
        if not math.isfinite(self.Rprime):
            raise ParameterError("Rprime", "must be finite")
        if self.Rprime == 0:
            raise ParameterError("Rprime", "zero dR/dT produces no 3-omega signal")
        if self.D is not None:
            _positive(self, "D")
            area = math.pi * self.D**2 / 4
            if abs(self.S - area) > CYLINDER_AREA_RTOL * area:
                warnings.warn(
                    f"cross-section S={self.S:.4g} m^2 differs from pi D^2/4={area:.4g} m^2",
                    stacklevel=3,
                )
        if self.emissivity is not None and not 0 <= self.emissivity <= 1:
            raise ParameterError("emissivity", f"must lie in [0, 1], got {self.emissivity!r}")
        if self.eta is not None and not (math.isfinite(self.eta) and self.eta >= 0):
            raise ParameterError("eta", f"must be non-negative, got {self.eta!r}")

    def replace(self, **changes) -> "Specimen":
        return dataclasses.replace(self, **changes)

    def known(self) -> "KnownProperties":
        """The properties an experimenter knows before measuring kappa and cp."""
        return KnownProperties(L=self.L, S=self.S, R=self.R, Rprime=self.Rprime, rho=self.rho,
                               T0=self.T0, D=self.D, emissivity=self.emissivity, eta=self.eta)

    @property
    def alpha(self) -> float:
        return self.kappa / (self.rho * self.cp)

    @property
    def gamma(self) -> float:
        return self.L**2 / (math.pi**2 * self.alpha)


@dataclass(frozen=True)
class KnownProperties:
    """Geometry, density and electrical data of a specimen whose kappa and cp are unknown."""

    L: float
    S: float
    R: float
    Rprime: float
    rho: float
    T0: float
    D: Optional[float] = None
    emissivity: Optional[float] = None
    eta: Optional[float] = None

    def __post_init__(self):
        _positive(self, "L", "S", "R", "rho", "T0")
        if not math.isfinite(self.Rprime) or self.Rprime == 0:
            raise ParameterError("Rprime", "must be finite and non-zero")

    def with_thermal(self, kappa: float, cp: float) -> Specimen:
        return Specimen(L=self.L, S=self.S, rho=self.rho, cp=cp, kappa=kappa, R=self.R, Rprime=self.Rprime,
                        T0=self.T0, D=self.D, emissivity=self.emissivity, eta=self.eta)


@dataclass(frozen=True)
class Drive:
    """Sinusoidal excitation current ``I0 sin(omega t)`` given by its rms value."""

    I_rms: float
    omega: float

    def __post_init__(self):
        _positive(self, "I_rms", "omega")

    @property
    def I0(self) -> float:
        return math.sqrt(2.0) * self.I_rms

    @property
    def frequency(self) -> float:
        """Drive frequency in Hz."""
        return self.omega / (2 * math.pi)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega


@dataclass(frozen=True)
class DerivedThermal:
    alpha: float
    gamma: float
    delta0: float


def heating_rate(spec: Specimen, drive: Drive) -> float:
    """Peak volumetric heating divided by the heat capacity per volume, K/s.

    The source term of the linearised heat equation is ``b sin^2(omega t)``.
    """
    return drive.I0**2 * spec.R / (spec.rho * spec.cp * spec.L * spec.S)


def feedback_rate(spec: Specimen, drive: Drive) -> float:
    """Coefficient ``c`` of the resistive self-heating feedback term, 1/s (signed)."""
    return drive.I0**2 * spec.Rprime / (spec.rho * spec.cp * spec.L * spec.S)


def derive_thermal(spec: Specimen, drive: Drive) -> DerivedThermal:
    """Diffusivity, axial time constant and the dc temperature scale.

    ``delta0 = 2 gamma b / pi = 2 I0^2 R L / (pi^3 kappa S)``. The time-averaged
    temperature rise at the centre is ``delta0 * pi^3 / 32``.
    """
    alpha = spec.alpha
    gamma = spec.L**2 / (math.pi**2 * alpha)
    delta0 = 2 * gamma * heating_rate(spec, drive) / math.pi
    return DerivedThermal(alpha=alpha, gamma=gamma, delta0=delta0)


def self_heating_ratio(spec: Specimen, drive: Drive, n: int = 1) -> float:
    """Ratio of resistive heating inhomogeneity to total heating for mode ``n``.

    ``I0^2 |R'| L / (n^2 pi^2 kappa S)``; the feedback term is negligible
    when this is much smaller than one.
    """
    if n < 1:
        raise ParameterError("n", "mode index must be >= 1")
    return drive.I0**2 * abs(spec.Rprime) * spec.L / (n**2 * math.pi**2 * spec.kappa * spec.S)


def radiation_g(spec: Specimen) -> float:
    """Linearised radiative loss rate ``16 eps sigma T0^3 / (rho cp D)`` in 1/s."""
    if spec.D is None or spec.emissivity is None:
        raise ConfigurationError("radiation loss needs both diameter D and emissivity")
    return 16 * spec.emissivity * SIGMA_SB * spec.T0**3 / (spec.rho * spec.cp * spec.D)


def convection_g(spec: Specimen) -> float:
    """Gas-convection loss rate ``4 eta / (rho cp D)`` in 1/s."""
    if spec.D is None or spec.eta is None:
        raise ConfigurationError("convection loss needs both diameter D and eta")
    return 4 * spec.eta / (spec.rho * spec.cp * spec.D)


def loss_rate(spec: Specimen, model: str = "none") -> float:
    """Total radial loss rate for ``model`` in {none, radiation, convection, both}."""
    if model == "none":
        return 0.0
    if model == "radiation":
        return radiation_g(spec)
    if model == "convection":
        return convection_g(spec)
    if model == "both":
        return radiation_g(spec) + convection_g(spec)
    raise ConfigurationError(f"unknown loss model {model!r}")


def radial_loss_ratio(spec: Specimen, g: float) -> float:
    """The product ``g * gamma``; radial loss is negligible when it is << 1."""
    return g * spec.gamma


@dataclass(frozen=True)
class Thresholds:
    """Warn/fail levels for the dimensionless validity ratios."""

    warn: float = 0.05
    fail: float = 0.2

    def __post_init__(self):
        if not 0 < self.warn <= self.fail:
            raise ParameterError("thresholds", "need 0 < warn <= fail")

    def classify(self, value: float) -> str:
        if value >= self.fail:
            return "fail"
        if value >= self.warn:
            return "warn"
        return "ok"
