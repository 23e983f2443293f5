"""Batch over substrate temperatures: generate (or ingest) a sweep, fit it, report.

Each temperature is independent. A failure at one temperature is recorded
in its row and the batch carries on. Output files depend only on the config
and seed, never on worker scheduling.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .config import RunConfig, resolve_path
from .datasets import ingest_csv, write_xy_csv
from .errors import ConfigurationError, InputError, ThreeOmegaError
from .fitting import FitResult, SweepDataset, fit_amplitude, model_amplitude
from .lockin import fold_phase
from .scenarios import platinum_like
from .spectral import error_curves
from .synth import generate_sweep

RESULT_COLUMNS = (
    "T0_K", "status", "kappa_W_per_mK", "gamma_s", "cp_J_per_kgK", "self_heating_ratio",
    "radial_loss_ratio", "residual_norm", "source_kappa_W_per_mK", "source_cp_J_per_kgK", "message",
)


@dataclass(frozen=True)
class PointOutcome:
    T0: float
    data: Optional[SweepDataset]
    fit: Optional[FitResult]
    error: Optional[str] = None

    def row(self) -> dict:
        row = {"T0_K": self.T0, "status": "ok" if self.error is None else "error", "message": self.error or ""}
        if self.fit is not None:
            d = self.fit.diagnostics
            row.update(kappa_W_per_mK=self.fit.kappa, gamma_s=self.fit.gamma, cp_J_per_kgK=self.fit.cp,
                       self_heating_ratio=d.get("self_heating_ratio"), radial_loss_ratio=d.get("radial_loss_ratio"),
                       residual_norm=self.fit.residual_norm)
        if self.data is not None:
            for key in ("source_kappa_W_per_mK", "source_cp_J_per_kgK"):
                if key in self.data.meta:
                    row[key] = float(self.data.meta[key])
        return row


@dataclass(frozen=True)
class PipelineResult:
    outcomes: tuple
    files: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(o.error is None for o in self.outcomes)


def _read_manifest(cfg: RunConfig) -> dict:
    path = resolve_path(cfg, cfg.pipeline.manifest)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from None
    rows = [r for r in csv.reader(line for line in text.splitlines() if line.strip() and not line.startswith("#"))]
    if not rows or [c.strip() for c in rows[0]] != ["T0_K", "path"]:
        raise InputError("manifest header must be 'T0_K,path'", 1)
    out = {}
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != 2:
            raise InputError("expected 'T0_K,path'", i)
        try:
            T = float(r[0])
        except ValueError:
            raise InputError(f"bad temperature {r[0]!r}", i) from None
        p = Path(r[1].strip())
        out[T] = p if p.is_absolute() else path.parent / p
    return out


def _dataset_for(cfg: RunConfig, T: float, manifest: Optional[dict]) -> SweepDataset:
    if manifest is not None:
        if T not in manifest:
            raise InputError(f"manifest has no entry for T0 = {T!r} K")
        known = None
        if cfg.specimen.L is not None:
            known = replace(cfg.specimen.known(), T0=T)
        return ingest_csv(manifest[T], known=known, I_rms=cfg.drive.current)
    if cfg.pipeline.material == "platinum_like":
        target = cfg.pipeline.target_delta0 if cfg.pipeline.target_delta0 is not None else 1.0
        spec, current = platinum_like(T, target, emissivity=cfg.specimen.emissivity)
        if cfg.drive.current is not None:
            current = cfg.drive.current
        return generate_sweep(cfg, specimen=spec, I_rms=current)
    spec = cfg.specimen.specimen().replace(T0=T)
    return generate_sweep(cfg, specimen=spec)


def run_point(cfg: RunConfig, T: float, manifest: Optional[dict] = None) -> PointOutcome:
    data = None
    try:
        data = _dataset_for(cfg, T, manifest)
        fit = fit_amplitude(data, model=cfg.fit.model, window=cfg.fit.window, thresholds=cfg.fit.thresholds())
        return PointOutcome(T, data, fit)
    except ThreeOmegaError as exc:
        return PointOutcome(T, data, None, f"{type(exc).__name__}: {exc}")


def _point_job(args):
    cfg, T, manifest = args
    # parallelism lives at the temperature level; sweeps inside run serially
    inner = cfg.replace(pipeline=replace(cfg.pipeline, workers=1))
    return run_point(inner, T, manifest)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def format_results(outcomes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    for o in outcomes:
        row = o.row()
        w.writerow([_fmt(row.get(c)) for c in RESULT_COLUMNS])
    return buf.getvalue()


def format_report(items) -> str:
    """``key = value`` lines; ``items`` is an iterable of pairs or a dict."""
    if isinstance(items, dict):
        items = items.items()
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in items)


def write_plot_files(outdir: Path, stem: str, data: SweepDataset, fit: FitResult) -> list:
    """Amplitude-vs-frequency and tan(phi)-vs-2 omega overlays as (x, y_data, y_fit) CSVs."""
    files = []
    scale = data.amplitude_scale()
    omega = data.omegas
    y_fit = model_amplitude(omega, fit.kappa, fit.gamma, scale, fit.model)
    rows = [(f, a, m) for f, a, m in zip(omega / (2 * math.pi), data.amplitudes, y_fit)]
    files.append(write_xy_csv(outdir / f"{stem}_amplitude.csv", ("freq_hz", "v3w_vrms", "v3w_fit_vrms"), rows))
    if data.has_phase:
        tan_phi = np.tan(fold_phase(data.phases, data.known.Rprime))
        rows = [(x, y, x * fit.gamma) for x, y in zip(2 * omega, tan_phi)]
        files.append(write_xy_csv(outdir / f"{stem}_tanphi.csv", ("two_omega_rad_per_s", "tan_phi", "tan_phi_fit"), rows))
    return files


def write_error_table(path: Path, x_max: float = 10.0, n_points: int = 101, n_max: int = 99) -> Path:
    curves = error_curves(np.linspace(0.0, x_max, n_points), n_max)
    return write_xy_csv(path, ("reduced_freq", "A_full", "B_first", "A_minus_B", "relative"), curves.rows())


def run_pipeline(cfg: RunConfig, outdir) -> PipelineResult:
    temps = cfg.pipeline.temperatures
    if not temps:
        raise ConfigurationError("[pipeline] temperatures is empty")
    if len(set(temps)) != len(temps):
        raise ConfigurationError("[pipeline] temperatures contain duplicates")
    manifest = _read_manifest(cfg) if cfg.pipeline.manifest else None
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    jobs = [(cfg, float(T), manifest) for T in temps]
    if cfg.pipeline.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.pipeline.workers) as pool:
            outcomes = list(pool.map(_point_job, jobs))
    else:
        outcomes = [run_point(c, T, m) for c, T, m in jobs]

    prefix = cfg.io.prefix
    files = [outdir / f"{prefix}results.csv"]
    files[0].write_text(format_results(outcomes), encoding="utf-8")
    report = [("n_temperatures", len(outcomes)), ("n_failed", sum(o.error is not None for o in outcomes)),
              ("model", cfg.fit.model), ("seed", cfg.io.seed)]
    for o in outcomes:
        tag = f"T{o.T0:g}K"
        if o.fit is None:
            report.append((f"{tag}.error", o.error))
            continue
        for k, v in o.fit.report().items():
            report.append((f"{tag}.{k}", v))
        files.extend(write_plot_files(outdir, f"{prefix}{tag}", o.data, o.fit))
    report_path = outdir / f"{prefix}report.txt"
    report_path.write_text(format_report(report), encoding="utf-8")
    files.append(report_path)
    if cfg.pipeline.error_table:
        files.append(write_error_table(outdir / f"{prefix}error_table.csv"))
    return PipelineResult(tuple(outcomes), tuple(files))
