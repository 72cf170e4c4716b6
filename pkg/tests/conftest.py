import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from nmqc.boolfn import BooleanFunction
from nmqc.families import family


def solve_rational(A, b):
    """Gauss-Jordan elimination over Fractions for a square nonsingular system."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bv)] for row, bv in zip(A, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * c for a, c in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def random_function(n, rng):
    return BooleanFunction(n, tuple(rng.randint(0, 1) for _ in range(1 << n)))


@st.composite
def functions(draw, min_n=1, max_n=4):
    n = draw(st.integers(min_n, max_n))
    table = draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n))
    return BooleanFunction(n, tuple(table))


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def g2():
    return family("g", 2)


@pytest.fixture
def g3():
    return family("g", 3)


@pytest.fixture
def h3():
    return family("h", 3)
