import math

import numpy as np
import pytest

from conftest import approx, drive_at, rod
from threeomega.core import Drive, heating_rate, self_heating_ratio
from threeomega.errors import ConvergenceError, ParameterError
from threeomega.fdm import GridSpec, apparent_from_oracle, oracle_phasor, oracle_sweep, solve, switch_off_decay
from threeomega.lockin import demodulate
from threeomega.spectral import v3w_phasor


def phase_gap_deg(a, b):
    return abs(math.degrees((a - b + math.pi) % (2 * math.pi) - math.pi))


@pytest.mark.parametrize("reduced", [0.1, 1.0, 4.0, 10.0])
def test_oracle_matches_series(reduced):
    s = rod()
    d = drive_at(s, reduced)
    got = oracle_phasor(s, d)
    ref = v3w_phasor(s, d)
    # frozen from the default grid (nx=129, 512 steps/period): ~2e-4 and < 0.01 degree
    assert got.amplitude_rms == approx(ref.amplitude_rms, rel=5e-4)
    assert phase_gap_deg(got.phase, ref.phase) < 0.02


def test_oracle_negative_rprime():
    s = rod(Rprime=-0.1)
    d = drive_at(s, 1.0)
    got, ref = oracle_phasor(s, d), v3w_phasor(s, d)
    assert got.amplitude_rms == approx(ref.amplitude_rms, rel=5e-4)
    assert phase_gap_deg(got.phase, ref.phase) < 0.02


def test_grid_convergence():
    s = rod()
    d = drive_at(s, 4.0)
    coarse = oracle_phasor(s, d)
    fine = oracle_phasor(s, d, GridSpec(nx=259, steps_per_period=1024))
    assert coarse.amplitude_rms == approx(fine.amplitude_rms, rel=1e-3)


def test_dc_steady_state_is_parabola():
    s = rod()
    d = Drive(5e-3, 2 * math.pi / s.gamma)  # period = gamma; only sets the sampling clock
    tr = solve(s, d, GridSpec(settle_periods=25, n_periods=27), dc=True)
    b = heating_rate(s, d)
    assert tr.center_temp[-1] == approx(b * s.L**2 / (8 * s.alpha), rel=1e-7)
    prof = tr.profiles[-1]
    np.testing.assert_allclose(prof, b * tr.x * (s.L - tr.x) / (2 * s.alpha), rtol=1e-6,
                               atol=1e-7 * prof.max())


def test_dc_energy_balance():
    s = rod()
    d = Drive(5e-3, 2 * math.pi / s.gamma)
    tr = solve(s, d, GridSpec(settle_periods=25, n_periods=27), dc=True)
    u = tr.profiles[-1]
    h = tr.x[1] - tr.x[0]
    slope_left = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    slope_right = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    flux_out = s.kappa * s.S * (slope_left - slope_right)
    power_in = d.I0**2 * s.R
    assert flux_out == approx(power_in, rel=1e-3)


def test_linearity_in_current():
    s = rod()
    a = solve(s, drive_at(s, 1.0, I_rms=2e-3))
    b = solve(s, drive_at(s, 1.0, I_rms=6e-3))
    np.testing.assert_allclose(b.dR, 9 * a.dR, rtol=1e-9, atol=1e-12 * np.abs(b.dR).max())
    va = demodulate(a, a.omega, 3).amplitude_rms
    vb = demodulate(b, b.omega, 3).amplitude_rms
    assert vb == approx(27 * va, rel=1e-8)


def test_profiles_symmetric_and_clamped():
    s = rod()
    tr = solve(s, drive_at(s, 3.0))
    p = tr.profiles
    assert np.all(p[:, 0] == 0) and np.all(p[:, -1] == 0)
    assert np.max(np.abs(p - p[:, ::-1])) <= 1e-10 * np.max(np.abs(p))


def test_trace_arrays_consistent():
    s = rod()
    tr = solve(s, drive_at(s, 1.0))
    n = len(tr.times)
    assert len(tr.dR) == len(tr.voltage) == len(tr.center_temp) == n
    assert n % tr.grid.samples_per_period == 0
    assert tr.defect <= tr.grid.defect_tol
    assert tr.times[0] == approx(tr.grid.settle_periods * 2 * math.pi / tr.omega, rel=1e-12)
    rows = list(tr.to_rows())
    assert len(rows) == n and len(rows[0]) == 4


def test_self_heating_feedback_is_small():
    s = rod()
    d = Drive(0.01 / math.sqrt(2), 1.0 / (2 * s.gamma))
    assert self_heating_ratio(s, d) == approx(1.0132e-3, rel=1e-3)
    off = oracle_phasor(s, d)
    on = oracle_phasor(s, d, include_c_term=True)
    shift = abs(on.amplitude_rms / off.amplitude_rms - 1)
    assert shift < 5e-3
    # positive R' feeds heat back, so the signal grows
    assert on.amplitude_rms > off.amplitude_rms


def test_loss_matches_series_with_loss():
    s = rod()
    g = 0.5 / s.gamma
    d = drive_at(s, 2.0)
    got = oracle_phasor(s, d, g=g)
    ref = v3w_phasor(s, d, g=g)
    assert got.amplitude_rms == approx(ref.amplitude_rms, rel=5e-4)
    assert phase_gap_deg(got.phase, ref.phase) < 0.02


def test_decay_time_is_gamma():
    s = rod()
    t, amp = switch_off_decay(s)
    mask = t > 0.5 * s.gamma  # higher modes gone
    slope = np.polyfit(t[mask], np.log(amp[mask]), 1)[0]
    assert -1 / slope == approx(s.gamma, rel=1e-3)


def test_convergence_failure_reports_defect():
    s = rod()
    d = drive_at(s, 10.0)
    with pytest.raises(ConvergenceError) as info:
        solve(s, d, GridSpec(settle_periods=1, n_periods=3))
    assert info.value.defect > 1e-6


def test_grid_validation():
    s = rod()
    d = drive_at(s, 1.0)
    with pytest.raises(ParameterError):
        GridSpec(nx=8).resolve(s, d)
    with pytest.raises(ParameterError):
        GridSpec(settle_periods=4, n_periods=4).resolve(s, d)
    with pytest.raises(ParameterError):
        GridSpec(dt=d.period / 500.5).resolve(s, d)
    with pytest.raises(ParameterError):
        GridSpec(steps_per_period=500).resolve(s, d)
    with pytest.raises(ParameterError):
        solve(s, d, g=-1.0)


def test_resolved_grid_defaults():
    s = rod()
    d = drive_at(s, 1.0)
    gr = GridSpec().resolve(s, d)
    assert gr.dt == approx(d.period / 512, rel=1e-14)
    assert gr.n_periods == gr.settle_periods + 2


def test_sweep_parallel_matches_serial():
    s = rod()
    omegas = [x / (2 * s.gamma) for x in (0.5, 2.0, 6.0)]
    serial = oracle_sweep(s, 5e-3, omegas)
    parallel = oracle_sweep(s, 5e-3, omegas, workers=2)
    assert serial == parallel


def test_apparent_parameters_without_loss():
    s = rod()
    kappa_ap, gamma_ap, fit = apparent_from_oracle(s, 5e-3, g=0.0)
    assert kappa_ap == approx(s.kappa, rel=0.02)
    assert gamma_ap == approx(s.gamma, rel=0.02)
    assert fit.cp == approx(s.cp, rel=0.02)
