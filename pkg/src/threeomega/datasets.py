"""Sweep CSV files.

Layout::

    # key = value            (optional metadata comments)
    freq_hz,v3w_vrms[,phase_deg][,sigma_vrms]
    1.25,3.1e-06,178.2,3e-08
    ...

Floats are written with ``repr`` so emit -> ingest is exact. When the
metadata carries the specimen's known properties and the current, a file can
be fitted on its own.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Optional

from .core import KnownProperties
from .errors import InputError, ParameterError
from .fitting import SweepDataset, V3wPoint

REQUIRED = ("freq_hz", "v3w_vrms")
OPTIONAL = ("phase_deg", "sigma_vrms")

# metadata key -> KnownProperties field
KNOWN_KEYS = {
    "L_m": "L", "S_m2": "S", "R_ohm": "R", "Rprime_ohm_per_K": "Rprime", "rho_kg_per_m3": "rho",
    "T0_K": "T0", "D_m": "D", "emissivity": "emissivity", "eta_W_per_m2K": "eta",
}
CURRENT_KEY = "I_rms_A"


def known_to_meta(known: KnownProperties, I_rms: float) -> dict:
    meta = {}
    for key, name in KNOWN_KEYS.items():
        value = getattr(known, name)
        if value is not None:
            meta[key] = repr(float(value))
    meta[CURRENT_KEY] = repr(float(I_rms))
    return meta


def _known_from_meta(meta: dict) -> Optional[KnownProperties]:
    kwargs = {}
    for key, name in KNOWN_KEYS.items():
        if key in meta:
            try:
                kwargs[name] = float(meta[key])
            except ValueError:
                raise InputError(f"metadata {key} = {meta[key]!r} is not a number") from None
    try:
        return KnownProperties(**kwargs)
    except (TypeError, ParameterError):
        return None


def format_sweep_csv(data: SweepDataset) -> str:
    cols = list(REQUIRED)
    has_phase = data.has_phase
    has_sigma = data.sigmas is not None
    if has_phase:
        cols.append("phase_deg")
    if has_sigma:
        cols.append("sigma_vrms")
    buf = io.StringIO()
    for key in sorted(data.meta):
        buf.write(f"# {key} = {data.meta[key]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for p in data.points:
        row = [repr(float(p.freq_hz)), repr(float(p.amplitude_rms))]
        if has_phase:
            row.append(repr(float(p.phase_deg)))
        if has_sigma:
            row.append(repr(float(p.sigma)))
        w.writerow(row)
    return buf.getvalue()


def write_sweep_csv(data: SweepDataset, path) -> Path:
    path = Path(path)
    path.write_text(format_sweep_csv(data), encoding="utf-8")
    return path


def parse_sweep_csv(text: str, known: Optional[KnownProperties] = None, I_rms: Optional[float] = None) -> SweepDataset:
    """Parse CSV text; ``known``/``I_rms`` override what the metadata says."""
    meta = {}
    header = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        fields = next(csv.reader([stripped]))
        fields = [f.strip() for f in fields]
        if header is None:
            header = fields
            if tuple(header[:2]) != REQUIRED:
                raise InputError(f"header must start with {','.join(REQUIRED)}, got {stripped!r}", lineno)
            extra = header[2:]
            if any(c not in OPTIONAL for c in extra) or len(set(extra)) != len(extra) or \
                    [c for c in OPTIONAL if c in extra] != extra:
                raise InputError(f"unexpected columns {extra}; allowed (in order): {', '.join(OPTIONAL)}", lineno)
            continue
        if len(fields) != len(header):
            raise InputError(f"expected {len(header)} fields, got {len(fields)}", lineno)
        try:
            values = dict(zip(header, (float(f) for f in fields)))
        except ValueError:
            raise InputError(f"non-numeric value in {stripped!r}", lineno) from None
        try:
            point = V3wPoint(freq_hz=values["freq_hz"], amplitude_rms=values["v3w_vrms"],
                             phase_deg=values.get("phase_deg"), sigma=values.get("sigma_vrms"))
        except ParameterError as exc:
            raise InputError(str(exc), lineno) from None
        rows.append((lineno, point))
    if header is None:
        raise InputError("no header row found")

    rows.sort(key=lambda r: r[1].freq_hz)
    for (la, a), (lb, b) in zip(rows, rows[1:]):
        if a.freq_hz == b.freq_hz:
            raise InputError(f"duplicate frequency {a.freq_hz!r} Hz (also on line {la})", lb)

    if known is None:
        known = _known_from_meta(meta)
        if known is None:
            raise InputError("specimen properties missing: pass them explicitly or include metadata comments")
    if I_rms is None:
        if CURRENT_KEY not in meta:
            raise InputError(f"excitation current missing: pass it explicitly or add '# {CURRENT_KEY} = ...'")
        I_rms = float(meta[CURRENT_KEY])
    return SweepDataset(points=tuple(p for _, p in rows), known=known, I_rms=I_rms, meta=meta)


def ingest_csv(path, known: Optional[KnownProperties] = None, I_rms: Optional[float] = None) -> SweepDataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_sweep_csv(text, known, I_rms)


def write_xy_csv(path, header, rows) -> Path:
    """Plot-ready CSV, e.g. ``(x, y_data, y_fit)`` triplets."""
    path = Path(path)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) or hasattr(v, "dtype") else v for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path
