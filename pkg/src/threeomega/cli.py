"""Command-line entry point ``threeomega``.

Exit codes: 0 success, 1 bad input/config/parameters, 2 convergence or fit
failure, 3 a validity ratio crossed its fail threshold (``check`` only).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .core import Drive, loss_rate, radial_loss_ratio, self_heating_ratio
from .datasets import ingest_csv, write_sweep_csv, write_xy_csv
from .errors import ConvergenceError, FitError, ThreeOmegaError
from .fdm import solve
from .fitting import fit_amplitude, fit_phase
from .lockin import demodulate
from .pipeline import format_report, run_pipeline, write_error_table, write_plot_files
from .spectral import SeriesControl, error_curves, v3w_phasor
from .synth import ENGINES, NoiseSpec, generate_sweep
from .units import parse_quantity

OUTDIR_ENV = "THREEOMEGA_OUTDIR"
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3


def _config(args) -> RunConfig:
    return load_config(args.config) if getattr(args, "config", None) else RunConfig()


def _outdir(args, cfg: RunConfig) -> Path:
    """``--outdir`` beats the environment variable, which beats ``[io] outdir``."""
    path = Path(args.outdir or os.environ.get(OUTDIR_ENV) or cfg.io.outdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_report(path: Path, items) -> None:
    text = format_report(items)
    path.write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _frequency(args, cfg: RunConfig, spec) -> float:
    if args.frequency is not None:
        return parse_quantity(args.frequency, "frequency")
    return float(cfg.drive.frequency_grid(spec.gamma)[0])


def cmd_simulate(args) -> int:
    cfg = _config(args)
    spec = cfg.specimen.specimen()
    drive = Drive(cfg.drive.current, 2 * math.pi * _frequency(args, cfg, spec))
    g = loss_rate(spec, cfg.simulation.loss)
    trace = solve(spec, drive, cfg.simulation.grid(), include_c_term=cfg.simulation.include_c_term, g=g)
    out = _outdir(args, cfg)
    prefix = cfg.io.prefix
    write_xy_csv(out / f"{prefix}trace.csv", ("time_s", "voltage_v", "dR_ohm", "center_temp_K"), trace.to_rows())
    d = demodulate(trace, drive.omega, 3)
    ref = v3w_phasor(spec, drive, SeriesControl(cfg.simulation.n_max), g)
    _write_report(out / f"{prefix}simulate.txt", [
        ("freq_hz", drive.frequency),
        ("reduced_freq", 2 * drive.omega * spec.gamma),
        ("v3w_rms_V", d.amplitude_rms),
        ("v3w_phase_deg", math.degrees(d.phase)),
        ("series_v3w_rms_V", ref.amplitude_rms),
        ("series_v3w_phase_deg", math.degrees(ref.phase)),
        ("periodicity_defect", trace.defect),
        ("include_c_term", cfg.simulation.include_c_term),
        ("loss_rate_per_s", g),
    ])
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    seed = cfg.io.seed if args.seed is None else args.seed
    noise = NoiseSpec(cfg.noise.amplitude, cfg.noise.phase, seed)
    data = generate_sweep(cfg, noise=noise, engine=args.engine)
    out = _outdir(args, cfg)
    path = write_sweep_csv(data, out / f"{cfg.io.prefix}sweep.csv")
    sys.stdout.write(f"wrote {len(data.points)} points to {path}\n")
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _config(args)
    known = cfg.specimen.known() if cfg.specimen.L is not None else None
    data = ingest_csv(args.csv, known=known, I_rms=cfg.drive.current)
    model = args.model or cfg.fit.model
    window = cfg.fit.window if args.window is None else parse_quantity(args.window, "dimensionless")
    fit = fit_amplitude(data, model=model, window=window, thresholds=cfg.fit.thresholds())
    items = list(fit.report().items())
    if data.has_phase:
        pf = fit_phase(data, window=cfg.fit.phase_window)
        items += [("phase_gamma_s", pf.gamma), ("phase_gamma_se", pf.gamma_se),
                  ("phase_n_points", pf.n_points), ("phase_biased", pf.biased)]
    out = _outdir(args, cfg)
    stem = f"{cfg.io.prefix}fit"
    write_plot_files(out, stem, data, fit)
    _write_report(out / f"{stem}.txt", items)
    return EXIT_OK


def cmd_analyze_error(args) -> int:
    cfg = _config(args)
    out = _outdir(args, cfg)
    path = write_error_table(out / f"{cfg.io.prefix}error_table.csv", args.x_max, args.points, args.n_max)
    curves = error_curves(np.linspace(0.0, args.x_max, args.points), args.n_max)
    rel = curves.relative
    _write_report(out / f"{cfg.io.prefix}error_summary.txt", [
        ("n_max", args.n_max),
        ("difference_at_zero", float(curves.difference[0])),
        ("odd_zeta4_minus_one", math.pi**4 / 96 - 1),
        ("relative_monotone_increasing", bool(np.all(np.diff(rel) > 0))),
        ("table", str(path)),
    ])
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    if args.seed is not None:
        cfg = cfg.replace(io=replace(cfg.io, seed=args.seed))
    result = run_pipeline(cfg, _outdir(args, cfg))
    for o in result.outcomes:
        status = "ok" if o.error is None else f"error: {o.error}"
        sys.stdout.write(f"T0 = {o.T0:g} K  {status}\n")
    return EXIT_OK if result.ok else EXIT_NUMERIC


def cmd_check(args) -> int:
    cfg = _config(args)
    spec = cfg.specimen.specimen()
    thresholds = cfg.fit.thresholds()
    drive = Drive(cfg.drive.current, 2 * math.pi * _frequency(args, cfg, spec))
    heating = self_heating_ratio(spec, drive)
    items = [("self_heating_ratio", heating), ("self_heating_status", thresholds.classify(heating))]
    statuses = [thresholds.classify(heating)]
    model = cfg.simulation.loss
    if model == "none" and spec.D is not None and (spec.emissivity is not None or spec.eta is not None):
        model = "both" if spec.emissivity is not None and spec.eta is not None else (
            "radiation" if spec.emissivity is not None else "convection")
    if model != "none":
        g = loss_rate(spec, model)
        ratio = radial_loss_ratio(spec, g)
        statuses.append(thresholds.classify(ratio))
        items += [("loss_model", model), ("loss_rate_per_s", g), ("radial_loss_ratio", ratio),
                  ("radial_loss_status", statuses[-1])]
    _write_report(_outdir(args, cfg) / f"{cfg.io.prefix}check.txt", items)
    return EXIT_CHECK if "fail" in statuses else EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1), not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="threeomega", description="3-omega thermal measurement toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, config_required=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=config_required, help="INI run configuration")
        sp.add_argument("--outdir", help=f"output directory (overrides ${OUTDIR_ENV} and [io] outdir)")
        sp.set_defaults(func=func)
        return sp

    sp = add("simulate", cmd_simulate, "time-domain simulation at one frequency, full trace out")
    sp.add_argument("--frequency", help="drive frequency, e.g. '2 Hz' (default: first grid point)")
    sp = add("sweep", cmd_sweep, "generate a synthetic frequency sweep CSV")
    sp.add_argument("--engine", choices=ENGINES)
    sp.add_argument("--seed", type=int)
    sp = add("fit", cmd_fit, "fit kappa and gamma to a sweep CSV", config_required=False)
    sp.add_argument("csv", help="sweep CSV (freq_hz,v3w_vrms[,phase_deg][,sigma_vrms])")
    sp.add_argument("--model", choices=("first_term", "offset"))
    sp.add_argument("--window", help="upper bound on 2*omega*gamma for fitted points")
    sp = add("analyze-error", cmd_analyze_error, "truncation error table", config_required=False)
    sp.add_argument("--x-max", type=float, default=10.0)
    sp.add_argument("--points", type=int, default=101)
    sp.add_argument("--n-max", type=int, default=99)
    sp = add("pipeline", cmd_pipeline, "batch over substrate temperatures")
    sp.add_argument("--seed", type=int)
    sp = add("check", cmd_check, "self-heating and radial-loss validity ratios")
    sp.add_argument("--frequency", help="drive frequency (default: first grid point)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConvergenceError, FitError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    except (ThreeOmegaError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
