"""Pointwise degeneracy predicates, the imaginary-eigenvalue resultant,
local multiplicity via Macaulay dual spaces, and Gabrielov-Khovanskii bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

import numpy as np

from . import linalg
from .errors import JetError
from .jets import PolyVF
from .scalar import EXACT

__all__ = [
    "DegeneracyVerdict",
    "MultiplicityResult",
    "nonhyperbolic_test",
    "genuinely_nonhyperbolic",
    "degeneracy_verdict",
    "charpoly",
    "imag_split",
    "sylvester_resultant",
    "imag_resultant",
    "multiplicity",
    "gk_point_bound",
    "gk_sum_bound",
    "gk_floor_point",
    "gk_floor_sum",
    "gk_strict_max_point",
]


def _exact_matrix(A) -> bool:
    return all(isinstance(c, (int, Fraction)) for row in A for c in row)


def _det_tr(J):
    (a, b), (c, d) = J
    return a * d - b * c, a + d


@dataclass(frozen=True)
class DegeneracyVerdict:
    singular: bool
    nonhyperbolic: bool
    det: object
    tr: object

    def __post_init__(self):
        if self.nonhyperbolic and not self.singular:
            raise ValueError("a non-singular point cannot be flagged non-hyperbolic")


def nonhyperbolic_test(J: Sequence[Sequence], tol: float = 1e-12) -> bool:
    """Verbatim degeneracy condition ``det(J) * tr(J) == 0``.

    Exact for rational entries; for floats ``|det * tr| < tol``. This is
    necessary but not sufficient for non-hyperbolicity (a saddle with
    ``tr = 0`` passes); see :func:`genuinely_nonhyperbolic`.
    """
    det, tr = _det_tr(J)
    if _exact_matrix(J):
        return det * tr == 0
    return abs(det * tr) < tol


def genuinely_nonhyperbolic(J: Sequence[Sequence], tol: float = 1e-12) -> bool:
    """``det == 0`` or (``tr == 0`` and ``det > 0``): some eigenvalue on the imaginary axis."""
    det, tr = _det_tr(J)
    if _exact_matrix(J):
        return det == 0 or (tr == 0 and det > 0)
    return abs(det) < tol or (abs(tr) < tol and det > 0)


def degeneracy_verdict(value: Sequence, J: Sequence[Sequence], tol: float = 1e-12) -> DegeneracyVerdict:
    """Verdict for a point where the field takes ``value`` and has Jacobian ``J``."""
    det, tr = _det_tr(J)
    if all(isinstance(c, (int, Fraction)) for c in value):
        singular = all(c == 0 for c in value)
    else:
        singular = max(abs(c) for c in value) < tol
    return DegeneracyVerdict(singular, singular and nonhyperbolic_test(J, tol), det, tr)


# ------------------------------------------------------------------ resultant

def charpoly(A: Sequence[Sequence]) -> list:
    """Coefficients ``[c_0, ..., c_n]`` of ``det(lambda I - A)`` (Faddeev-LeVerrier)."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise JetError("charpoly needs a square matrix")
    exact = _exact_matrix(A)
    one = Fraction(1) if exact else 1.0
    M = [[one * a for a in row] for row in A]
    coeffs = [0 * one] * (n + 1)
    coeffs[n] = one
    Mk = [[0 * one] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk <- A Mk + c_{n-k+1} I
        prod = [[sum(M[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += coeffs[n - k + 1]
        Mk = prod
        AM = [[sum(M[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
    return coeffs


def imag_split(coeffs: Sequence) -> tuple:
    """Real and imaginary parts of ``P(i mu)`` as coefficient lists in ``mu``."""
    zero = 0 * coeffs[0]
    re = [zero] * len(coeffs)
    im = [zero] * len(coeffs)
    for j, c in enumerate(coeffs):
        sign = -1 if (j // 2) % 2 else 1
        if j % 2 == 0:
            re[j] = sign * c
        else:
            im[j] = sign * c
    return re, im


def _strip(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def sylvester_resultant(p: Sequence, q: Sequence):
    """Resultant of two univariate polynomials given low-to-high coefficients.

    Leading zero coefficients are stripped first. The resultant is 0 when
    either polynomial is identically zero; a nonzero constant ``c`` against a
    polynomial of degree ``d`` gives ``c**d``.
    """
    p, q = _strip(p), _strip(q)
    if not p or not q:
        return 0 * (p[0] if p else (q[0] if q else 0))
    m, n = len(p) - 1, len(q) - 1
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    size = m + n
    zero = 0 * p[0]
    rows = []
    for s in range(n):
        row = [zero] * size
        for i, c in enumerate(reversed(p)):
            row[s + i] = c
        rows.append(row)
    for s in range(m):
        row = [zero] * size
        for i, c in enumerate(reversed(q)):
            row[s + i] = c
        rows.append(row)
    if all(isinstance(c, (int, Fraction)) for row in rows for c in row):
        return linalg.det(rows)
    return float(np.linalg.det(np.array(rows, dtype=float)))


def imag_resultant(A: Sequence[Sequence]):
    """Resultant test for eigenvalues on the imaginary axis.

    Parameters
    ----------
    A : square matrix (N >= 2) of ints/Fractions (exact) or floats.

    Returns
    -------
    Scalar
        ``Res(P1, P2)`` where ``P(i mu) = P1(mu) + i P2(mu)`` and ``P`` is
        the characteristic polynomial. It vanishes whenever ``A`` has an
        eigenvalue ``i mu`` with real ``mu`` (including 0). For 2x2 matrices
        ``R = tr^2 det``.
    """
    if len(A) < 2:
        raise JetError("imag_resultant needs N >= 2")
    re, im = imag_split(charpoly(A))
    return sylvester_resultant(re, im)


# ------------------------------------------------------------------ multiplicity

@dataclass(frozen=True)
class MultiplicityResult:
    """Local multiplicity at 0; ``multiplicity`` is None when the dual space did not stabilize."""

    multiplicity: int | None
    stabilized: bool
    dims: tuple
    cutoff: int

    def __str__(self):
        return str(self.multiplicity) if self.stabilized else f">= {self.cutoff}"


def _monomials(d: int) -> list:
    return [(i, t - i) for t in range(d + 1) for i in range(t, -1, -1)]


def _dual_dim(polys: list, d: int, exact: bool) -> int:
    cols = _monomials(d)
    pos = {m: n for n, m in enumerate(cols)}
    rows = []
    for f in polys:
        for (i, j) in cols:
            g = {(a + i, b + j): c for (a, b), c in f.items() if a + b + i + j <= d}
            if g:
                row = [0] * len(cols)
                for mono, c in g.items():
                    row[pos[mono]] = c
                rows.append(row)
    if not rows:
        return len(cols)
    if exact:
        r = linalg.rank(rows)
    else:
        r = int(np.linalg.matrix_rank(np.array(rows, dtype=float)))
    return len(cols) - r


def multiplicity(v: PolyVF, degree_cutoff: int = 12) -> MultiplicityResult:
    """Local intersection multiplicity of ``v = 0`` at the origin.

    Parameters
    ----------
    v : PolyVF
        Field vanishing at 0; its polynomial representative is used.
    degree_cutoff : int
        Largest order of differential functionals considered.

    Returns
    -------
    MultiplicityResult
        Dimensions of the Macaulay dual spaces ``D_0, D_1, ...``; the first
        ``d`` with ``dim D_d == dim D_(d-1)`` gives the multiplicity. The
        zero field (or a non-isolated zero) never stabilizes.
    """
    if v.constant() != (0, 0):
        raise JetError("multiplicity needs v(0) = 0")
    if degree_cutoff < 1:
        raise JetError("degree_cutoff must be positive")
    exact = v.backend == EXACT
    polys = [p for p in (dict(v.dx), dict(v.dy)) if p]
    dims = []
    for d in range(degree_cutoff + 1):
        dims.append(_dual_dim(polys, d, exact))
        if d >= 1 and dims[-1] == dims[-2]:
            return MultiplicityResult(dims[-1], True, tuple(dims), degree_cutoff)
    return MultiplicityResult(None, False, tuple(dims), degree_cutoff)


# ------------------------------------------------------------------ bounds

def gk_point_bound(k: int) -> float:
    """Bound ``2/(3 sqrt 3) (k+2)^(3/2)`` on the multiplicity of a singular point in a k-parameter family."""
    if k < 0:
        raise JetError("k must be non-negative")
    n = k + 2
    return (2.0 / 3.0) * n * math.sqrt(n / 3.0)


def gk_sum_bound(k: int) -> float:
    """``k`` times :func:`gk_point_bound`: bound on the total multiplicity of non-hyperbolic points."""
    return k * gk_point_bound(k)


def gk_floor_point(k: int) -> int:
    """Largest integer ``n <= gk_point_bound(k)``, computed exactly (``27 n^2 <= 4 (k+2)^3``)."""
    if k < 0:
        raise JetError("k must be non-negative")
    return isqrt(4 * (k + 2) ** 3 // 27)


def gk_floor_sum(k: int) -> int:
    """Largest integer ``n <= gk_sum_bound(k)`` (``27 n^2 <= 4 k^2 (k+2)^3``)."""
    if k < 0:
        raise JetError("k must be non-negative")
    return isqrt(4 * k * k * (k + 2) ** 3 // 27)


def gk_strict_max_point(k: int) -> int:
    """Largest integer strictly below :func:`gk_point_bound` (differs from the floor when the bound is integral)."""
    n = gk_floor_point(k)
    return n - 1 if 27 * n * n == 4 * (k + 2) ** 3 else n
