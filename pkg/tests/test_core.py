import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import approx, rod
from threeomega.core import (
    SIGMA_SB,
    Drive,
    KnownProperties,
    Thresholds,
    convection_g,
    derive_thermal,
    feedback_rate,
    heating_rate,
    loss_rate,
    radial_loss_ratio,
    radiation_g,
    self_heating_ratio,
)
from threeomega.errors import ConfigurationError, ParameterError


def test_gamma_and_alpha(spec):
    alpha = spec.kappa / (spec.rho * spec.cp)
    assert spec.alpha == approx(alpha)
    assert spec.gamma == approx(spec.L**2 / (math.pi**2 * alpha))


def test_delta0_matches_dimensional_form(spec, drive):
    d = derive_thermal(spec, drive)
    expected = 2 * drive.I0**2 * spec.R * spec.L / (math.pi**3 * spec.kappa * spec.S)
    assert d.delta0 == approx(expected, rel=1e-14)
    assert d.delta0 == approx(2 * d.gamma * heating_rate(spec, drive) / math.pi, rel=1e-14)


def test_feedback_rate_sign_follows_rprime(spec, drive):
    assert feedback_rate(spec, drive) > 0
    assert feedback_rate(spec.replace(Rprime=-0.1), drive) == approx(-feedback_rate(spec, drive))


@pytest.mark.parametrize("name, value", [
    ("L", 0.0), ("S", -1.0), ("rho", math.nan), ("cp", math.inf), ("kappa", 0.0), ("R", -2.0), ("T0", 0.0),
])
def test_invalid_positive_fields(name, value):
    with pytest.raises(ParameterError) as info:
        rod(**{name: value})
    assert info.value.field == name


def test_zero_rprime_rejected():
    with pytest.raises(ParameterError, match="Rprime"):
        rod(Rprime=0.0)


def test_negative_rprime_allowed():
    assert rod(Rprime=-0.05).Rprime == -0.05


def test_emissivity_range():
    with pytest.raises(ParameterError):
        rod(D=math.sqrt(4e-8 / math.pi), emissivity=1.5)


def test_area_mismatch_warns():
    with pytest.warns(UserWarning, match="differs"):
        rod(D=1e-3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rod(D=math.sqrt(4 * 1e-8 / math.pi))


def test_drive_validation():
    with pytest.raises(ParameterError):
        Drive(0.0, 1.0)
    with pytest.raises(ParameterError):
        Drive(1e-3, -1.0)
    d = Drive(1e-3, 2 * math.pi * 5)
    assert d.frequency == approx(5)
    assert d.period == approx(0.2)
    assert d.I0 == approx(math.sqrt(2) * 1e-3)


def test_self_heating_ratio_small_example():
    # I0 = 10 mA, R' = 0.1 Ohm/K, L = 1 mm, S = 1e-2 mm^2, kappa = 100 W/mK
    s = rod()
    d = Drive(0.01 / math.sqrt(2), 1.0)
    assert self_heating_ratio(s, d) == approx(1.0132118364233778e-3, rel=1e-12)
    assert self_heating_ratio(s, d, n=3) == approx(self_heating_ratio(s, d) / 9)
    with pytest.raises(ParameterError):
        self_heating_ratio(s, d, n=0)


def test_radiation_rate_and_ratio():
    D = 10e-6
    s = rod(S=math.pi * D**2 / 4, D=D, emissivity=1.0)
    g = radiation_g(s)
    assert g == approx(16 * SIGMA_SB * 300.0**3 / (s.rho * s.cp * D))
    # g gamma = 16 eps sigma T0^3 L^2 / (pi^2 kappa D): independent of rho and cp
    assert radial_loss_ratio(s, g) == approx(16 * SIGMA_SB * 300.0**3 * 1e-6 / (math.pi**2 * 100 * D))
    assert radial_loss_ratio(s, g) == approx(2.4818016006088782e-3, rel=1e-12)


def test_convection_and_combined():
    D = 10e-6
    s = rod(S=math.pi * D**2 / 4, D=D, emissivity=0.5, eta=20.0)
    assert convection_g(s) == approx(4 * 20.0 / (s.rho * s.cp * D))
    assert loss_rate(s, "both") == approx(radiation_g(s) + convection_g(s))
    assert loss_rate(s, "none") == 0.0
    with pytest.raises(ConfigurationError):
        loss_rate(s, "conduction")


def test_loss_needs_geometry():
    with pytest.raises(ConfigurationError):
        radiation_g(rod())
    with pytest.raises(ConfigurationError):
        convection_g(rod(D=math.sqrt(4e-8 / math.pi)))


def test_known_roundtrip(spec):
    k = spec.known()
    assert isinstance(k, KnownProperties)
    assert k.with_thermal(spec.kappa, spec.cp) == spec


def test_thresholds():
    t = Thresholds(0.05, 0.2)
    assert [t.classify(v) for v in (0.01, 0.05, 0.1, 0.2, 1.0)] == ["ok", "warn", "warn", "fail", "fail"]
    with pytest.raises(ParameterError):
        Thresholds(0.3, 0.2)


@given(st.floats(0.1, 10), st.floats(0.1, 10))
def test_delta0_scales_with_current_squared(s_current, s_kappa):
    spec = rod()
    d = Drive(1e-3, 10.0)
    base = derive_thermal(spec, d).delta0
    scaled = derive_thermal(spec.replace(kappa=spec.kappa * s_kappa), Drive(1e-3 * s_current, 10.0)).delta0
    assert scaled == approx(base * s_current**2 / s_kappa, rel=1e-12)
