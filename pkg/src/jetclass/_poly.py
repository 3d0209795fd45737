"""Sparse bivariate polynomials as ``{(i, j): coeff}`` dicts.

Internal helpers; every function returns a fresh dict without zero entries.
"""
from __future__ import annotations

from typing import Dict, Tuple

Monomial = Tuple[int, int]
Poly = Dict[Monomial, object]


def clean(p: Poly) -> Poly:
    return {m: c for m, c in p.items() if c != 0}


def degree(p: Poly) -> int:
    return max((i + j for i, j in p), default=-1)


def truncate(p: Poly, maxdeg: int) -> Poly:
    return {m: c for m, c in p.items() if m[0] + m[1] <= maxdeg and c != 0}


def add(p: Poly, q: Poly, alpha=1) -> Poly:
    """p + alpha*q."""
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, 0) + alpha * c
    return clean(out)


def scale(p: Poly, c) -> Poly:
    return clean({m: c * a for m, a in p.items()})


def mul(p: Poly, q: Poly, maxdeg: int | None = None) -> Poly:
    out: Poly = {}
    for (i1, j1), a in p.items():
        for (i2, j2), b in q.items():
            i, j = i1 + i2, j1 + j2
            if maxdeg is not None and i + j > maxdeg:
                continue
            out[(i, j)] = out.get((i, j), 0) + a * b
    return clean(out)


def diff(p: Poly, var: int) -> Poly:
    out: Poly = {}
    for (i, j), c in p.items():
        if var == 0 and i:
            out[(i - 1, j)] = c * i
        elif var == 1 and j:
            out[(i, j - 1)] = c * j
    return clean(out)


def homogeneous(p: Poly, d: int) -> Poly:
    return {m: c for m, c in p.items() if m[0] + m[1] == d}


def evaluate(p: Poly, x, y):
    total = 0
    for (i, j), c in p.items():
        total = total + c * x**i * y**j
    return total


def _powers(h: Poly, n: int, maxdeg: int, one) -> list:
    out = [{(0, 0): one}]
    for _ in range(n):
        out.append(mul(out[-1], h, maxdeg))
    return out


def compose(p: Poly, hx: Poly, hy: Poly, maxdeg: int, one=1) -> Poly:
    """p(hx, hy) truncated at total degree ``maxdeg``."""
    if not p:
        return {}
    ni = max(i for i, _ in p)
    nj = max(j for _, j in p)
    px = _powers(hx, ni, maxdeg, one)
    py = _powers(hy, nj, maxdeg, one)
    out: Poly = {}
    for (i, j), c in p.items():
        for m, a in mul(px[i], py[j], maxdeg).items():
            out[m] = out.get(m, 0) + c * a
    return clean(out)


def max_abs(p: Poly) -> float:
    return max((abs(float(c)) for c in p.values()), default=0.0)
