import math

import pytest

from threeomega.core import Drive, Specimen


def rod(**changes) -> Specimen:
    """1 mm rod, 0.01 mm^2 section, metal-like properties; gamma is about 2.9 ms."""
    base = dict(L=1e-3, S=1e-8, rho=21450.0, cp=133.0, kappa=100.0, R=1.0, Rprime=0.1, T0=300.0)
    base.update(changes)
    return Specimen(**base)


def drive_at(spec: Specimen, reduced: float, I_rms: float = 5e-3) -> Drive:
    """Drive whose reduced frequency 2 omega gamma equals ``reduced``."""
    return Drive(I_rms, reduced / (2 * spec.gamma))


@pytest.fixture
def spec():
    return rod()


@pytest.fixture
def drive(spec):
    return drive_at(spec, 1.0)


def rel(a, b):
    return abs(a - b) / abs(b)


SQRT2 = math.sqrt(2)


def approx(expected, rel=1e-6, abs=0):
    """``pytest.approx`` without the default 1e-12 absolute slack, which would
    swallow comparisons of the sub-microvolt amplitudes used here."""
    return pytest.approx(expected, rel=rel, abs=abs)


ACCEPTANCE_LINES = []


def record_criterion(number: int, checks) -> bool:
    """Print and remember one verdict line; ``checks`` holds (label, ok, detail) triples."""
    ok = all(c[1] for c in checks)
    detail = "; ".join(f"{label} {'ok' if good else 'FAILED'} ({info})" for label, good, info in checks)
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
