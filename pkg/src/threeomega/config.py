"""Run configuration: an INI file whose values may carry units.

Example::

    [specimen]
    L = 8 mm
    D = 20 um
    rho = 21450 kg/m3
    ...

    [drive]
    current = 5 mA
    reduced_max = 4
    n_points = 41

Unknown sections or keys are rejected. :func:`dump_config` writes the
canonical SI form, so load -> dump -> load -> dump is byte-stable.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .core import KnownProperties, Specimen, Thresholds
from .errors import ConfigurationError
from .fdm import GridSpec
from .units import parse_list, parse_quantity

SI_LABEL = {
    "length": "m", "area": "m^2", "density": "kg/m3", "specific_heat": "J/kgK", "conductivity": "W/mK",
    "resistance": "ohm", "dr_dt": "ohm/K", "temperature": "K", "current": "A", "frequency": "Hz",
    "heat_transfer": "W/m2K", "angle": "rad", "dimensionless": "", "rate": "1/s", "time": "s",
}


def _q(kind, default=None):
    return field(default=default, metadata={"kind": kind})


@dataclass(frozen=True)
class SpecimenBlock:
    L: Optional[float] = _q("length")
    S: Optional[float] = _q("area")
    D: Optional[float] = _q("length")
    rho: Optional[float] = _q("density")
    cp: Optional[float] = _q("specific_heat")
    kappa: Optional[float] = _q("conductivity")
    R: Optional[float] = _q("resistance")
    Rprime: Optional[float] = _q("dr_dt")
    T0: Optional[float] = _q("temperature")
    emissivity: Optional[float] = _q("dimensionless")
    eta: Optional[float] = _q("heat_transfer")

    @property
    def area(self) -> Optional[float]:
        if self.S is not None:
            return self.S
        return None if self.D is None else math.pi * self.D**2 / 4

    def _require(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if "S" in missing and self.D is not None:
            missing.remove("S")
        if missing:
            raise ConfigurationError(f"[specimen] is missing {', '.join(missing)}")

    def known(self) -> KnownProperties:
        self._require("L", "S", "rho", "R", "Rprime", "T0")
        return KnownProperties(L=self.L, S=self.area, R=self.R, Rprime=self.Rprime, rho=self.rho, T0=self.T0,
                               D=self.D, emissivity=self.emissivity, eta=self.eta)

    def specimen(self) -> Specimen:
        self._require("L", "S", "rho", "cp", "kappa", "R", "Rprime", "T0")
        return self.known().with_thermal(self.kappa, self.cp)


@dataclass(frozen=True)
class DriveBlock:
    current: Optional[float] = _q("current")
    frequencies: tuple = _q("list:frequency", ())
    f_min: Optional[float] = _q("frequency")
    f_max: Optional[float] = _q("frequency")
    reduced_min: Optional[float] = _q("dimensionless")
    reduced_max: Optional[float] = _q("dimensionless")
    n_points: int = _q("int", 41)
    spacing: str = _q("choice:linear,log", "linear")

    def frequency_grid(self, gamma: Optional[float] = None) -> np.ndarray:
        """Frequencies in Hz.

        Priority: explicit list, then ``f_min``/``f_max``, then a grid in
        reduced frequency ``2 omega gamma`` (needs ``gamma``). A missing
        ``reduced_min`` puts the points at ``reduced_max * k / n_points``.
        """
        if self.frequencies:
            return np.array(sorted(self.frequencies), dtype=float)
        if self.f_min is not None and self.f_max is not None:
            return _spaced(self.f_min, self.f_max, self.n_points, self.spacing)
        if self.reduced_max is not None:
            if gamma is None:
                raise ConfigurationError("reduced-frequency grid needs a known gamma")
            lo = self.reduced_min if self.reduced_min is not None else self.reduced_max / self.n_points
            x = _spaced(lo, self.reduced_max, self.n_points, self.spacing)
            return x / (4 * math.pi * gamma)
        raise ConfigurationError("[drive] needs frequencies, f_min/f_max, or reduced_max")


def _spaced(lo, hi, n, spacing):
    if spacing == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


@dataclass(frozen=True)
class SimulationBlock:
    engine: str = _q("choice:spectral,oracle", "spectral")
    n_max: int = _q("int", 99)
    include_c_term: bool = _q("bool", False)
    loss: str = _q("choice:none,radiation,convection,both", "none")
    nx: int = _q("int", 129)
    steps_per_period: int = _q("int", 512)
    settle_periods: Optional[int] = _q("int")
    n_periods: Optional[int] = _q("int")

    def grid(self) -> GridSpec:
        return GridSpec(nx=self.nx, steps_per_period=self.steps_per_period,
                        settle_periods=self.settle_periods, n_periods=self.n_periods)


@dataclass(frozen=True)
class FitBlock:
    model: str = _q("choice:first_term,offset", "offset")
    window: Optional[float] = _q("dimensionless", 4.0)
    phase_window: Optional[float] = _q("dimensionless", 1.0)
    warn: float = _q("dimensionless", 0.05)
    fail: float = _q("dimensionless", 0.2)

    def thresholds(self) -> Thresholds:
        return Thresholds(self.warn, self.fail)


@dataclass(frozen=True)
class NoiseBlock:
    amplitude: float = _q("dimensionless", 0.0)
    phase: float = _q("angle", 0.0)


@dataclass(frozen=True)
class IOBlock:
    outdir: str = _q("str", "out")
    prefix: str = _q("str", "")
    seed: int = _q("int", 0)


@dataclass(frozen=True)
class PipelineBlock:
    temperatures: tuple = _q("list:temperature", ())
    material: str = _q("choice:none,platinum_like", "none")
    target_delta0: Optional[float] = _q("temperature")
    manifest: Optional[str] = _q("str")
    workers: int = _q("int", 1)
    error_table: bool = _q("bool", False)


SECTIONS = {
    "specimen": SpecimenBlock,
    "drive": DriveBlock,
    "simulation": SimulationBlock,
    "fit": FitBlock,
    "noise": NoiseBlock,
    "io": IOBlock,
    "pipeline": PipelineBlock,
}


@dataclass(frozen=True)
class RunConfig:
    specimen: SpecimenBlock = SpecimenBlock()
    drive: DriveBlock = DriveBlock()
    simulation: SimulationBlock = SimulationBlock()
    fit: FitBlock = FitBlock()
    noise: NoiseBlock = NoiseBlock()
    io: IOBlock = IOBlock()
    pipeline: PipelineBlock = PipelineBlock()
    base_dir: Optional[str] = field(default=None, compare=False)

    def replace(self, **changes) -> "RunConfig":
        return replace(self, **changes)


def _parse_value(raw: str, kind: str, where: str):
    raw = raw.strip()
    if kind == "int":
        if raw.lower() == "none":
            return None
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"{where}: expected an integer, got {raw!r}") from None
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"{where}: expected a boolean, got {raw!r}")
    if kind == "str":
        return raw
    if kind.startswith("choice:"):
        options = kind.split(":", 1)[1].split(",")
        if raw not in options:
            raise ConfigurationError(f"{where}: {raw!r} not one of {options}")
        return raw
    try:
        if kind.startswith("list:"):
            return tuple(parse_list(raw, kind.split(":", 1)[1]))
        if raw.lower() == "none":
            return None
        return parse_quantity(raw, kind)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{where}: {exc}") from None


def parse_config(text: str, base_dir: Optional[str] = None) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    blocks = {}
    for section in parser.sections():
        cls = SECTIONS.get(section)
        if cls is None:
            raise ConfigurationError(f"unknown section [{section}]")
        known = {f.name: f for f in fields(cls)}
        values = {}
        for key, raw in parser.items(section):
            if key not in known:
                raise ConfigurationError(f"unknown key {key!r} in [{section}]")
            values[key] = _parse_value(raw, known[key].metadata["kind"], f"[{section}] {key}")
        blocks[section] = cls(**values)
    return RunConfig(**blocks, base_dir=base_dir)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base_dir=str(path.parent))


def _format_value(value, kind: str) -> str:
    if kind == "bool":
        return "true" if value else "false"
    if kind in ("int", "str") or kind.startswith("choice:"):
        return str(value)
    if kind.startswith("list:"):
        label = SI_LABEL[kind.split(":", 1)[1]]
        body = ", ".join(repr(float(v)) for v in value)
        return f"{body} {label}".rstrip()
    return f"{float(value)!r} {SI_LABEL[kind]}".rstrip()


def dump_config(cfg: RunConfig) -> str:
    """Canonical SI text of ``cfg``; ``None`` and empty values are omitted."""
    out = io.StringIO()
    for name in SECTIONS:
        block = getattr(cfg, name)
        out.write(f"[{name}]\n")
        for f in fields(block):
            value = getattr(block, f.name)
            if value is None:
                if f.default is not None:
                    out.write(f"{f.name} = none\n")
                continue
            if value == ():
                continue
            out.write(f"{f.name} = {_format_value(value, f.metadata['kind'])}\n")
        out.write("\n")
    return out.getvalue()


def resolve_path(cfg: RunConfig, path: str) -> Path:
    p = Path(path)
    if not p.is_absolute() and cfg.base_dir is not None:
        p = Path(cfg.base_dir) / p
    return p
