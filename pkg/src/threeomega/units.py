"""Parse unit-suffixed quantities such as ``"8 mm"`` or ``"1e-2 mm^2"`` into SI floats.

Each config field has a *kind*; only the units listed for that kind are
accepted. A bare number is taken to be SI already.
"""

from __future__ import annotations

import math
import re

from .errors import ConfigurationError

_LENGTH = {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}

UNITS = {
    "length": _LENGTH,
    "area": {f"{k}2": v**2 for k, v in _LENGTH.items()},
    "density": {"kg/m3": 1.0, "g/cm3": 1e3},
    "specific_heat": {"j/kgk": 1.0, "j/gk": 1e3},
    "conductivity": {"w/mk": 1.0, "w/cmk": 1e2},
    "resistance": {"ohm": 1.0, "mohm": 1e-3, "kohm": 1e3},
    "dr_dt": {"ohm/k": 1.0, "mohm/k": 1e-3},
    "temperature": {"k": 1.0},
    "current": {"a": 1.0, "ma": 1e-3, "ua": 1e-6},
    "frequency": {"hz": 1.0, "khz": 1e3, "rad/s": 1 / (2 * math.pi)},
    "rate": {"1/s": 1.0, "s-1": 1.0},
    "time": {"s": 1.0, "ms": 1e-3},
    "heat_transfer": {"w/m2k": 1.0},
    "angle": {"rad": 1.0, "deg": math.pi / 180},
    "dimensionless": {"": 1.0, "%": 1e-2},
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def _normalise(unit: str) -> str:
    u = unit.strip().lower()
    for a, b in (("µ", "u"), ("μ", "u"), ("Ω", "ohm"), ("ω", "ohm"), ("²", "2"), ("³", "3"), ("^", ""),
                 ("·", ""), ("*", ""), (" ", ""), ("(", ""), (")", "")):
        u = u.replace(a, b)
    return u


def parse_quantity(text, kind: str) -> float:
    """Convert ``text`` to SI for the given quantity kind.

    >>> parse_quantity("8 mm", "length")
    0.008
    """
    if isinstance(text, (int, float)):
        return float(text)
    m = _NUMBER.match(str(text))
    if not m:
        raise ConfigurationError(f"cannot parse {text!r} as a number with unit")
    value, unit = float(m.group(1)), _normalise(m.group(2))
    if not unit:
        return value
    table = UNITS[kind]
    if unit not in table:
        raise ConfigurationError(f"unit {m.group(2)!r} not valid for {kind}; use one of {sorted(table)}")
    return value * table[unit]


def parse_list(text, kind: str) -> list:
    """Comma-separated quantities; a trailing unit applies to bare numbers before it."""
    items = [s for s in (p.strip() for p in str(text).split(",")) if s]
    if not items:
        return []
    last = _NUMBER.match(items[-1])
    default_unit = last.group(2) if last else ""
    out = []
    for item in items:
        m = _NUMBER.match(item)
        if m and not m.group(2) and default_unit:
            item = f"{item} {default_unit}"
        out.append(parse_quantity(item, kind))
    return out
