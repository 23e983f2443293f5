"""Synthetic material curves for temperature-sweep demonstrations.

The platinum-like wire uses textbook model forms, not measured data:
a Debye lattice heat capacity plus a linear electronic term, a
Bloch-Grueneisen resistivity with a small residual part, and a
conductivity from the free-electron Lorenz number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .core import LORENZ_FREE_ELECTRON, Specimen
from .errors import ParameterError

GAS_CONSTANT = 8.314462618  # J/(mol K)


@dataclass(frozen=True)
class PlatinumLike:
    """Parameters of the platinum-like model wire."""

    L: float = 8e-3
    D: float = 20e-6
    rho: float = 21450.0
    molar_mass: float = 0.19508  # kg/mol
    debye_temperature: float = 240.0  # K, heat capacity
    electronic_coefficient: float = 6.8e-3  # J/(mol K^2)
    resistivity_temperature: float = 240.0  # K, Bloch-Grueneisen
    residual_resistivity: float = 1e-9  # Ohm m
    reference_resistivity: float = 9.8e-8  # Ohm m at reference_temperature
    reference_temperature: float = 273.0

    @property
    def S(self) -> float:
        return math.pi * self.D**2 / 4


def _debye_integral(y: float) -> float:
    def f(x):
        if x < 1e-8:
            return x * x
        ex = math.exp(-x)
        return x**4 * ex / (1 - ex) ** 2

    return quad(f, 0.0, y, limit=200)[0]


def _bg_kernel(x: float) -> float:
    if x < 1e-8:
        return x**3
    ex = math.exp(-x)
    # x^5 / ((e^x - 1)(1 - e^-x)) written to avoid overflow
    return x**5 * ex / (1 - ex) ** 2


def _bg_integral(y: float) -> float:
    return quad(_bg_kernel, 0.0, y, limit=200)[0]


def debye_cp(T: float, m: PlatinumLike = PlatinumLike()) -> float:
    """Specific heat per mass, J/(kg K)."""
    _check_T(T)
    y = m.debye_temperature / T
    lattice = 9 * GAS_CONSTANT * (T / m.debye_temperature) ** 3 * _debye_integral(y)
    return (lattice + m.electronic_coefficient * T) / m.molar_mass


def _bg_shape(T: float, theta: float) -> float:
    return (T / theta) ** 5 * _bg_integral(theta / T)


def resistivity(T: float, m: PlatinumLike = PlatinumLike()) -> float:
    """Electrical resistivity, Ohm m."""
    _check_T(T)
    theta = m.resistivity_temperature
    a = (m.reference_resistivity - m.residual_resistivity) / _bg_shape(m.reference_temperature, theta)
    return m.residual_resistivity + a * _bg_shape(T, theta)


def resistivity_slope(T: float, m: PlatinumLike = PlatinumLike()) -> float:
    """Analytic d(resistivity)/dT, Ohm m / K."""
    _check_T(T)
    theta = m.resistivity_temperature
    a = (m.reference_resistivity - m.residual_resistivity) / _bg_shape(m.reference_temperature, theta)
    y = theta / T
    return a * (5 * _bg_shape(T, theta) / T - (T / theta) ** 5 * _bg_kernel(y) * y / T)


def _check_T(T):
    if not (math.isfinite(T) and T > 0):
        raise ParameterError("T", f"temperature must be positive, got {T!r}")


def platinum_like(T: float, target_delta0: float = 1.0, m: PlatinumLike = PlatinumLike(),
                  emissivity=None) -> tuple:
    """Specimen at substrate temperature ``T`` and the rms current giving ``delta0 = target_delta0``.

    Returns
    -------
    (Specimen, float)
    """
    if not target_delta0 > 0:
        raise ParameterError("target_delta0", "must be positive")
    rho_e = resistivity(T, m)
    kappa = LORENZ_FREE_ELECTRON * T / rho_e
    S = m.S
    R = rho_e * m.L / S
    Rprime = resistivity_slope(T, m) * m.L / S
    spec = Specimen(L=m.L, S=S, rho=m.rho, cp=debye_cp(T, m), kappa=kappa, R=R, Rprime=Rprime, T0=T,
                    D=m.D, emissivity=emissivity)
    # delta0 = 2 I0^2 R L / (pi^3 kappa S)
    I0 = math.sqrt(target_delta0 * math.pi**3 * kappa * S / (2 * R * m.L))
    return spec, I0 / math.sqrt(2)
