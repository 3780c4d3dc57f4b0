from __future__ import annotations

import functools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from polydyn import LatticeMatrix, det, hull, volume

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 3))


def points(d: int, min_size: int = 1, max_size: int = 7):
    return st.lists(st.tuples(*[rationals] * d), min_size=min_size, max_size=max_size)


def polytopes(d: int, min_size: int = 1, max_size: int = 7):
    return points(d, min_size, max_size).map(hull)


def full_polytopes(d: int, max_size: int = 7):
    return polytopes(d, d + 1, max_size).filter(lambda P: volume(P) > 0)


def int_matrices(d: int, lo: int = -3, hi: int = 3, invertible: bool = True):
    rows = st.lists(st.lists(st.integers(lo, hi), min_size=d, max_size=d), min_size=d, max_size=d)
    mats = rows.map(LatticeMatrix.from_rows)
    return mats.filter(lambda A: det(A) != 0) if invertible else mats


@functools.lru_cache(maxsize=None)
def _cached_degrees(rows, n):
    from polydyn import degrees

    return tuple(degrees(LatticeMatrix.from_rows(rows), n))


@pytest.fixture(scope="session")
def degree_oracle():
    """``(A, n) -> [deg_0..deg_d]`` memoized across the session."""

    def lookup(A, n):
        return _cached_degrees(tuple(map(tuple, A.rows)), n)

    return lookup


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
