import random
from fractions import Fraction

import pytest

from rank2lab.reps import pair

ALGEBRAS = ("A2", "B2", "C2", "G2")


@pytest.fixture(scope="session")
def reps():
    """Both fundamentals of every algebra, keyed by algebra name."""
    return {a: pair(a) for a in ALGEBRAS}


def rational(rng: random.Random, magnitude: int = 5, nonzero: bool = False) -> Fraction:
    while True:
        v = Fraction(rng.randint(-magnitude, magnitude), rng.randint(1, magnitude))
        if v or not nonzero:
            return v


# one PASS/FAIL line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
