import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import approx, rod
from threeomega.config import parse_config
from threeomega.datasets import format_sweep_csv, write_sweep_csv
from threeomega.errors import ConfigurationError, ParameterError
from threeomega.fitting import fit_amplitude
from threeomega.pipeline import run_pipeline
from threeomega.scenarios import (
    GAS_CONSTANT,
    PlatinumLike,
    debye_cp,
    platinum_like,
    resistivity,
    resistivity_slope,
)
from threeomega.core import Drive, derive_thermal
from threeomega.synth import NoiseSpec, generate_sweep, synthesize

ROD_CONFIG = """
[specimen]
L = 1 mm
S = 0.01 mm2
rho = 21450 kg/m3
cp = 133 J/kgK
kappa = 100 W/mK
R = 1 ohm
Rprime = 0.1 ohm/K
T0 = 300 K

[drive]
current = 5 mA
reduced_max = 4
n_points = {n}

[noise]
amplitude = {noise}

[io]
seed = 3
"""


def rod_config(n=41, noise=0.0):
    return parse_config(ROD_CONFIG.format(n=n, noise=noise))


def test_noise_spec_validation():
    with pytest.raises(ParameterError):
        NoiseSpec(-0.1, 0.0, 1)
    with pytest.raises(ParameterError):
        NoiseSpec(0.1, -1.0, 1)
    with pytest.raises(ParameterError):
        NoiseSpec(0.1, 0.0, None)


def test_generate_sweep_metadata():
    data = generate_sweep(rod_config())
    m = data.meta
    assert m["engine"] == "spectral" and m["n_max"] == "99" and m["seed"] == "3"
    assert m["grid_nx"] == "none"
    assert len(data.points) == 41


def test_seeded_generation_is_byte_identical():
    cfg = rod_config(noise=0.01)
    a = format_sweep_csv(generate_sweep(cfg))
    b = format_sweep_csv(generate_sweep(cfg))
    c = format_sweep_csv(generate_sweep(cfg, noise=NoiseSpec(0.01, 0.0, 4)))
    assert a == b
    assert a != c


def test_noise_statistics():
    s = rod()
    f = np.full(1, 1.0)
    clean = synthesize(s, 5e-3, np.linspace(1, 2000, 4000), n_max=1)
    noisy = synthesize(s, 5e-3, np.linspace(1, 2000, 4000), n_max=1, noise=NoiseSpec(0.02, 0.01, 9))
    ratio = noisy.amplitudes / clean.amplitudes - 1
    assert np.std(ratio) == approx(0.02, rel=0.05)
    dphi = np.radians([p.phase_deg - q.phase_deg for p, q in zip(noisy.points, clean.points)])
    assert np.std(dphi) == approx(0.01, rel=0.05)
    np.testing.assert_allclose(noisy.sigmas, 0.02 * clean.amplitudes, rtol=1e-14)


def test_oracle_engine_agrees_with_series():
    cfg = rod_config(n=6)
    spectral = generate_sweep(cfg, engine="spectral")
    oracle = generate_sweep(cfg, engine="oracle")
    np.testing.assert_allclose(oracle.amplitudes, spectral.amplitudes, rtol=5e-3)
    assert oracle.meta["engine"] == "oracle" and oracle.meta["grid_nx"] == "129"


def test_feedback_term_needs_oracle():
    cfg = rod_config()
    cfg = cfg.replace(simulation=replace(cfg.simulation, include_c_term=True))
    with pytest.raises(ConfigurationError):
        generate_sweep(cfg)


def test_unknown_engine():
    with pytest.raises(ConfigurationError):
        synthesize(rod(), 1e-3, [1.0], engine="analog")


def test_radiation_grid_uses_apparent_time_constant():
    D = math.sqrt(4e-8 / math.pi)
    cfg = parse_config(ROD_CONFIG.format(n=41, noise=0) + "\n[simulation]\nloss = radiation\n")
    cfg = cfg.replace(specimen=replace(cfg.specimen, S=None, D=D, emissivity=1.0))
    data = generate_sweep(cfg)
    assert float(data.meta["loss_rate_per_s"]) > 0


# material curves


def test_resistivity_calibration():
    m = PlatinumLike()
    assert resistivity(273.0) == approx(9.8e-8, rel=1e-12)
    assert resistivity(1.0) == approx(m.residual_resistivity, rel=1e-3)
    for T in (15.0, 77.0, 300.0):
        h = 1e-3 * T
        numeric = (resistivity(T + h) - resistivity(T - h)) / (2 * h)
        assert resistivity_slope(T) == approx(numeric, rel=1e-5)


def test_debye_limits():
    m = PlatinumLike()
    electronic = m.electronic_coefficient * 2000.0 / m.molar_mass
    assert debye_cp(2000.0) - electronic == approx(3 * GAS_CONSTANT / m.molar_mass, rel=2e-3)
    # T^3 law well below the Debye temperature
    low = [debye_cp(T) - m.electronic_coefficient * T / m.molar_mass for T in (2.0, 4.0)]
    assert low[1] / low[0] == approx(8.0, rel=1e-3)


def test_platinum_current_sets_delta0():
    spec, current = platinum_like(300.0, target_delta0=0.5)
    assert derive_thermal(spec, Drive(current, 1.0)).delta0 == approx(0.5, rel=1e-12)
    assert spec.kappa == approx(2.45e-8 * 300.0 / resistivity(300.0), rel=1e-14)


def test_platinum_cp_roundtrip_across_temperature():
    cfg = parse_config("[drive]\nreduced_max = 4\nn_points = 41\n")
    for T in (10.0, 20.0, 40.0, 80.0, 160.0, 240.0, 320.0):
        spec, current = platinum_like(T)
        r = fit_amplitude(generate_sweep(cfg, specimen=spec, I_rms=current))
        assert r.cp == approx(spec.cp, rel=0.02), T


# pipeline

PIPELINE = """
[drive]
reduced_max = 4
n_points = 21

[pipeline]
temperatures = 20, 150, 300 K
material = platinum_like
error_table = true
workers = {workers}

[noise]
amplitude = 0.5 %

[io]
seed = 12
"""


def read_all(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_pipeline_outputs_and_determinism(tmp_path):
    cfg = parse_config(PIPELINE.format(workers=1))
    res = run_pipeline(cfg, tmp_path / "a")
    assert res.ok
    names = {p.name for p in res.files}
    assert {"results.csv", "report.txt", "error_table.csv", "T20K_amplitude.csv", "T300K_tanphi.csv"} <= names
    header = (tmp_path / "a" / "results.csv").read_text().splitlines()[0]
    assert header.startswith("T0_K,status,kappa_W_per_mK,gamma_s,cp_J_per_kgK,self_heating_ratio")
    run_pipeline(cfg, tmp_path / "b")
    run_pipeline(parse_config(PIPELINE.format(workers=3)), tmp_path / "c")
    assert read_all(tmp_path / "a") == read_all(tmp_path / "b") == read_all(tmp_path / "c")


def test_pipeline_plot_triplets(tmp_path):
    run_pipeline(parse_config(PIPELINE.format(workers=1)), tmp_path)
    rows = (tmp_path / "T150K_amplitude.csv").read_text().splitlines()
    assert rows[0] == "freq_hz,v3w_vrms,v3w_fit_vrms"
    assert len(rows) == 22 and all(len(r.split(",")) == 3 for r in rows)


def test_pipeline_continues_after_failure(tmp_path):
    spec, current = platinum_like(100.0)
    good = synthesize(spec, current, np.linspace(0.1, 4, 30) / (4 * math.pi * spec.gamma))
    write_sweep_csv(good, tmp_path / "t100.csv")
    (tmp_path / "manifest.csv").write_text("T0_K,path\n100,t100.csv\n200,missing.csv\n", encoding="utf-8")
    cfg = parse_config(f"[pipeline]\ntemperatures = 100, 200 K\nmanifest = {tmp_path / 'manifest.csv'}\n")
    res = run_pipeline(cfg, tmp_path / "out")
    assert not res.ok
    assert res.outcomes[0].error is None
    assert "InputError" in res.outcomes[1].error
    lines = (tmp_path / "out" / "results.csv").read_text().splitlines()
    assert lines[1].split(",")[1] == "ok" and lines[2].split(",")[1] == "error"


def test_pipeline_rejects_empty():
    with pytest.raises(ConfigurationError):
        run_pipeline(parse_config("[pipeline]\nmaterial = platinum_like\n"), "unused")
