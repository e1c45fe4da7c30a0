import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("dev", max_examples=50, deadline=None)
settings.load_profile("dev")


class FixedRng:
    """Stand-in RNG returning constants, for operator tests that pin R, N or C."""

    def __init__(self, uniform=0.5, normal=0.0, cauchy=0.0, seed=0):
        self.u, self.n, self.c = uniform, normal, cauchy
        self._gen = np.random.default_rng(seed)

    def _full(self, value, size):
        return value if size is None else np.full(size, float(value))

    def uniform(self, size=None):
        return self._full(self.u, size)

    def normal(self, size=None):
        return self._full(self.n, size)

    def cauchy(self, size=None):
        return self._full(self.c, size)

    def integers(self, high, size=None):
        return self._gen.integers(0, high, size)

    def bits(self, size):
        return self._gen.integers(0, 2, size, dtype=np.uint8)


@pytest.fixture
def fixed_rng():
    return FixedRng


DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def calibration():
    with open(DATA / "calibration.json") as fh:
        return json.load(fh)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE: dict[int, str] = {}
ACCEPTANCE_NOTES: list[str] = []


@pytest.fixture
def report():
    def _report(number: int, passed: bool, detail: str):
        ACCEPTANCE[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed
    return _report


@pytest.fixture
def note():
    return ACCEPTANCE_NOTES.append


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
    for line in ACCEPTANCE_NOTES:
        terminalreporter.write_line(f"  info: {line}")
