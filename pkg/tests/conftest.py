import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import settings
from hypothesis import strategies as st

from jetclass.jets import DiffeoJet, PolyVF

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

X, Y = sp.symbols("x y")


def small_fraction(nonzero=False):
    s = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5))
    return s.filter(lambda f: f != 0) if nonzero else s


def monomials(order, min_degree=0):
    return [(i, d - i) for d in range(min_degree, order + 1) for i in range(d + 1)]


@st.composite
def exact_fields(draw, order, min_degree=1, max_terms=6):
    monos = monomials(order, min_degree)
    comps = []
    for _ in range(2):
        keys = draw(st.lists(st.sampled_from(monos), max_size=max_terms, unique=True))
        comps.append({m: draw(small_fraction()) for m in keys})
    return PolyVF(order, comps[0], comps[1])


@st.composite
def exact_diffeos(draw, order, max_terms=4):
    a, d = draw(small_fraction(nonzero=True)), draw(small_fraction(nonzero=True))
    b, c = draw(small_fraction()), draw(small_fraction())
    if a * d == b * c:
        c += 1
    hx, hy = {(1, 0): a, (0, 1): b}, {(1, 0): c, (0, 1): d}
    monos = monomials(order, 2)
    for comp in (hx, hy):
        for m in draw(st.lists(st.sampled_from(monos), max_size=max_terms, unique=True)) if monos else []:
            comp[m] = draw(small_fraction())
    return DiffeoJet(order, hx, hy)


def random_fraction(rng, nonzero=False):
    while True:
        f = Fraction(rng.randint(-7, 7), rng.randint(1, 7))
        if f or not nonzero:
            return f


def random_diffeo(rng, order, exact=True, lo=-2.0, hi=2.0, min_det=0.25):
    """Random invertible jet; floats uniform in [lo, hi], or small rationals."""
    while True:
        if exact:
            hx = {m: random_fraction(rng) for m in monomials(order, 1)}
            hy = {m: random_fraction(rng) for m in monomials(order, 1)}
        else:
            hx = {m: rng.uniform(lo, hi) for m in monomials(order, 1)}
            hy = {m: rng.uniform(lo, hi) for m in monomials(order, 1)}
        det = hx[(1, 0)] * hy[(0, 1)] - hx[(0, 1)] * hy[(1, 0)]
        if abs(det) > (0 if exact else min_det):
            return DiffeoJet(order, hx, hy, backend="exact" if exact else "float")


def to_sympy(v):
    """Component polynomials of a PolyVF (or DiffeoJet) as sympy expressions."""
    px = getattr(v, "dx", None)
    if px is None:
        px, py = v.hx, v.hy
    else:
        py = v.dy
    conv = lambda c: sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sp.Float(c)
    ex = sum((conv(c) * X**i * Y**j for (i, j), c in px.items()), sp.Integer(0))
    ey = sum((conv(c) * X**i * Y**j for (i, j), c in py.items()), sp.Integer(0))
    return ex, ey


def truncate_expr(expr, m):
    poly = sp.Poly(sp.expand(expr), X, Y)
    return sum((c * X**i * Y**j for (i, j), c in poly.terms() if i + j <= m), sp.Integer(0))


def from_sympy(ex, ey, order):
    comps = []
    for e in (ex, ey):
        poly = sp.Poly(sp.expand(e), X, Y)
        comps.append({(i, j): Fraction(int(c.p), int(c.q)) for (i, j), c in poly.terms()
                      if i + j <= order and c != 0})
    return PolyVF(order, comps[0], comps[1])


def staircase_multiplicity(v):
    """Count standard monomials of the ideal (v_x, v_y); the local multiplicity when 0 is the only common zero."""
    f, g = to_sympy(v)
    G = sp.groebner([f, g], X, Y, order="grevlex")
    leads = [sp.Poly(p, X, Y).monoms(order="grevlex")[0] for p in G.exprs]
    return sum(1 for i in range(30) for j in range(30) if not any(i >= a and j >= b for a, b in leads))


ACCEPTANCE_LINES = []


def acceptance(n, ok, detail, label=""):
    """Record one acceptance line; printed in the terminal summary."""
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {n}{label}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(12345)
