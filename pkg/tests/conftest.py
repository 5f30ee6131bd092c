import math
from fractions import Fraction as F

import pytest
from hypothesis import strategies as st

from convsep.bodies import HPolytope, LpBall, VPolytope

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def rationals(lo=-3, hi=3, denom=4):
    return st.integers(lo * denom, hi * denom).map(lambda k: F(k, denom))


def rational_vectors(n, **kw):
    return st.tuples(*[rationals(**kw) for _ in range(n)])


@st.composite
def polytopes(draw, dim=2, max_gens=4):
    kind = draw(st.sampled_from(["h", "v"]))
    k = draw(st.integers(dim, max_gens))
    rows = draw(st.lists(rational_vectors(dim, lo=-2, hi=2), min_size=k, max_size=k))
    scale = draw(st.sampled_from([F(1), F(1, 2), F(3, 2)]))
    cls = HPolytope if kind == "h" else VPolytope
    try:
        body = cls(rows, scale)
    except ValueError:
        body = None
    from hypothesis import assume
    assume(body is not None and not body.degenerate)
    return body


@pytest.fixture
def interval():
    return HPolytope([[1]])


@pytest.fixture
def square():
    return HPolytope([[1, 0], [0, 1]])


@pytest.fixture
def disc():
    return LpBall(2, 1, 2)
