import math

import pytest
from hypothesis import strategies as st

from irslab.hyp2 import HPoint, Isometry, compose, diag, rotation

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def report():
    def add(number, ok, detail):
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    return add


coords = st.floats(-3.0, 3.0, allow_nan=False)


@st.composite
def isometries(draw, spread=2.0):
    """Random isometries from a KAK-style product, entries kept moderate."""
    t = draw(st.floats(-spread, spread))
    u = draw(st.floats(0, 2 * math.pi))
    v = draw(st.floats(0, 2 * math.pi))
    return compose(rotation(u), compose(diag(t), rotation(v)))


@st.composite
def hyperbolics(draw, lo=0.1, hi=4.0):
    ell = draw(st.floats(lo, hi))
    h = draw(isometries())
    return compose(h, compose(diag(ell), h.inverse())), ell


@st.composite
def points(draw):
    return HPoint(draw(coords), draw(st.floats(0.05, 5.0)))


def random_isometry(rng, spread=2.0):
    return compose(rotation(rng.uniform(0, 2 * math.pi)),
                   compose(diag(rng.uniform(-spread, spread)), rotation(rng.uniform(0, 2 * math.pi))))


__all__ = ["isometries", "hyperbolics", "points", "random_isometry", "Isometry"]
