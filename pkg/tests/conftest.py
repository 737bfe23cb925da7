import json
from pathlib import Path

import numpy as np
import pytest

from minkcurve import curves

DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def lopez_oracle():
    """Frozen closed-form values, regenerated by tests/oracles/make_lopez.py."""
    return json.loads((DATA / "lopez_oracle.json").read_text())


@pytest.fixture(scope="session")
def lopez():
    return curves.as_unit_speed(curves.builtin("lopez_L1"))


def lopez_theta(s):
    s = np.asarray(s, dtype=float)
    return (s**4 - s**2 - 1) / (s**2 - 1)


def lopez_tau(s):
    s = np.asarray(s, dtype=float)
    return (-(s**6) + 2 * s**4 + 2 * s**2 - 2) / (np.sqrt(s**2 - 1) * (s**4 - s**2 - 1))


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
