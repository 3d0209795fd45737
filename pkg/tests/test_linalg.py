import random
from fractions import Fraction

import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_fraction
from jetclass import linalg


def rank_deficient(rng, rows, cols, rank):
    basis = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(cols)] for _ in range(rank)]
    out = []
    for _ in range(rows):
        w = [rng.randint(-3, 3) for _ in range(rank)]
        out.append([sum(wi * b[j] for wi, b in zip(w, basis)) for j in range(cols)])
    return out


def test_against_sympy_on_rank_deficient_matrices():
    rng = random.Random(0)
    for _ in range(150):
        r, c = rng.randint(1, 7), rng.randint(1, 7)
        M = rank_deficient(rng, r, c, rng.randint(0, min(r, c)))
        S = sp.Matrix(M)
        assert linalg.rank(M) == S.rank()
        ker = linalg.nullspace(M, c)
        assert len(ker) == c - S.rank()
        for vec in ker:
            assert all(sum(a * x for a, x in zip(row, vec)) == 0 for row in M)
        if ker:
            assert sp.Matrix([list(v) for v in ker]).rank() == len(ker)
        if r == c:
            assert linalg.det(M) == S.det()


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small_fraction(), min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_det_matches_sympy(M):
    assert linalg.det(M) == sp.Matrix(M).det()


def test_solve():
    M = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    assert linalg.solve(M, [Fraction(3), Fraction(7)]) is None
    x = linalg.solve(M, [Fraction(3), Fraction(6)])
    assert x[0] + 2 * x[1] == 3


def test_empty_matrices():
    assert linalg.rank([]) == 0
    assert linalg.nullspace([], 2) == [[1, 0], [0, 1]]
    assert linalg.det([]) == 1
