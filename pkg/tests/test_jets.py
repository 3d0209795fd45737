from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import X, Y, exact_diffeos, exact_fields, from_sympy, to_sympy, truncate_expr
from jetclass.errors import BackendMismatchError, JetError, SingularLinearPartError
from jetclass.jets import DiffeoJet, JetBasisIndex, PolyVF, bracket, compose, invert_jet, pushforward

F = Fraction


def vf(order, dx=None, dy=None):
    return PolyVF(order, {k: F(v) for k, v in (dx or {}).items()}, {k: F(v) for k, v in (dy or {}).items()})


def sympy_bracket(v, w, m):
    vx, vy = to_sympy(v)
    wx, wy = to_sympy(w)
    V, W = sp.Matrix([vx, vy]), sp.Matrix([wx, wy])
    out = W.jacobian([X, Y]) * V - V.jacobian([X, Y]) * W
    return from_sympy(truncate_expr(out[0], m), truncate_expr(out[1], m), m)


# ---------------------------------------------------------------- PolyVF

def test_canonical_form_drops_zeros():
    v = PolyVF(2, {(1, 0): F(0), (0, 1): F(2)}, {})
    assert dict(v.dx) == {(0, 1): 2}
    assert v == vf(2, {(0, 1): 2})
    assert hash(v) == hash(vf(2, {(0, 1): 2}))


def test_rejects_degree_above_order():
    with pytest.raises(JetError):
        PolyVF(2, {(3, 0): F(1)}, {})


def test_rejects_mixed_backends():
    with pytest.raises(BackendMismatchError):
        PolyVF(2, {(1, 0): F(1)}, {(0, 1): 0.5})
    with pytest.raises(BackendMismatchError):
        vf(2, {(1, 0): 1}) + PolyVF(2, {(1, 0): 1.0}, {})


def test_fractions_in_lowest_terms():
    v = PolyVF(1, {(1, 0): F(2, 4)}, {})
    c = v.dx[(1, 0)]
    assert (c.numerator, c.denominator) == (1, 2)


def test_arithmetic():
    v = vf(2, {(2, 0): 1}, {(0, 1): -1})
    assert v - v == PolyVF.zero(2)
    assert (v * 2).dx[(2, 0)] == 2
    assert (-v).dy[(0, 1)] == 1


# ---------------------------------------------------------------- bracket

def test_bracket_rotation_euler_commute():
    assert bracket(vf(3, {(0, 1): -1}, {(1, 0): 1}), vf(3, {(1, 0): 1}, {(0, 1): 1}), 3).is_zero()


def test_bracket_example():
    assert bracket(vf(1, {(0, 1): 1}), vf(1, {}, {(1, 0): 1}), 1) == vf(1, {(1, 0): -1}, {(0, 1): 1})


def test_bracket_rejects_negative_order():
    with pytest.raises(JetError):
        bracket(vf(1), vf(1), -1)


@given(exact_fields(3, min_degree=0), exact_fields(3, min_degree=0))
def test_bracket_matches_symbolic_oracle(v, w):
    assert bracket(v, w, 3) == sympy_bracket(v, w, 3)


@given(exact_fields(3), exact_fields(3), exact_fields(3), st.sampled_from([F(2), F(-1, 3)]))
def test_bracket_bilinear_antisymmetric(u, v, w, a):
    assert bracket(u + v * a, w) == bracket(u, w) + bracket(v, w) * a
    assert bracket(v, w) == -bracket(w, v)
    assert bracket(v, v).is_zero()


@given(exact_fields(3), exact_fields(3), exact_fields(3))
def test_jacobi_identity_vanishing_jets(u, v, w):
    total = bracket(u, bracket(v, w)) + bracket(v, bracket(w, u)) + bracket(w, bracket(u, v))
    assert total.is_zero()


# ---------------------------------------------------------------- diffeomorphism jets

def test_diffeo_rejects_constant_and_singular():
    with pytest.raises(JetError):
        DiffeoJet(2, {(0, 0): F(1), (1, 0): F(1)}, {(0, 1): F(1)})
    with pytest.raises(SingularLinearPartError):
        DiffeoJet(2, {(1, 0): F(1)}, {(1, 0): F(2)})


def test_invert_examples():
    assert invert_jet(DiffeoJet.identity(3)) == DiffeoJet.identity(3)
    assert invert_jet(DiffeoJet.linear([[F(2), F(0)], [F(0), F(1)]])) == DiffeoJet.linear(
        [[F(1, 2), F(0)], [F(0), F(1)]])
    h = DiffeoJet(2, {(1, 0): F(1), (0, 2): F(1)}, {(0, 1): F(1)})
    assert invert_jet(h) == DiffeoJet(2, {(1, 0): F(1), (0, 2): F(-1)}, {(0, 1): F(1)})


def test_compose_example():
    g = DiffeoJet.linear([[F(2), F(0)], [F(0), F(2)]], order=2)
    h = DiffeoJet(2, {(1, 0): F(1), (0, 2): F(1)}, {(0, 1): F(1)})
    assert compose(g, h) == DiffeoJet(2, {(1, 0): F(2), (0, 2): F(2)}, {(0, 1): F(2)})


@given(exact_diffeos(4))
def test_invert_is_two_sided(h):
    ident = DiffeoJet.identity(4)
    assert compose(h, invert_jet(h)) == ident
    assert compose(invert_jet(h), h) == ident


# ---------------------------------------------------------------- pushforward

def test_pushforward_examples():
    v = vf(2, {(2, 0): 1})
    assert pushforward(DiffeoJet.identity(2), v, 2) == v
    h = DiffeoJet.linear([[F(2), F(0)], [F(0), F(2)]], order=2)
    assert pushforward(h, v, 2) == vf(2, {(2, 0): F(1, 2)})
    assert pushforward(h, PolyVF.zero(2), 2).is_zero()


def test_pushforward_requires_orders():
    with pytest.raises(JetError):
        pushforward(DiffeoJet.identity(1), vf(3), 3)


@given(exact_diffeos(3), exact_fields(3))
def test_pushforward_conjugation_relation(h, v):
    # (h_* v) o h == Dh . v through order m, checked without inverting h
    w = pushforward(h, v, 3)
    hx, hy = to_sympy(h)
    wx, wy = to_sympy(w)
    vx, vy = to_sympy(v)
    H = sp.Matrix([hx, hy])
    lhs = [sp.expand(e.subs({X: hx, Y: hy}, simultaneous=True)) for e in (wx, wy)]
    rhs = list(H.jacobian([X, Y]) * sp.Matrix([vx, vy]))
    for a, b in zip(lhs, rhs):
        assert truncate_expr(a - b, 3) == 0


@given(exact_diffeos(3), exact_diffeos(3), exact_fields(3))
def test_pushforward_functorial(g, h, v):
    assert pushforward(compose(g, h), v) == pushforward(g, pushforward(h, v))


@given(exact_diffeos(3), exact_fields(3), exact_fields(3))
def test_pushforward_bracket_equivariant(h, v, w):
    lhs = pushforward(h, bracket(v, w))
    rhs = bracket(pushforward(h, v), pushforward(h, w))
    assert lhs == rhs


def test_pushforward_keeps_singular_point():
    h = DiffeoJet(3, {(1, 0): F(1), (1, 1): F(3)}, {(0, 1): F(2), (2, 0): F(-1)})
    w = pushforward(h, vf(3, {(1, 0): 1, (2, 1): 5}, {(0, 2): 1}))
    assert w.constant() == (0, 0)


# ---------------------------------------------------------------- basis bookkeeping

@pytest.mark.parametrize("m", range(1, 11))
def test_basis_dimensions(m):
    idx = JetBasisIndex(m)
    assert len(idx) == (m + 1) * (m + 2)
    assert len(idx.vanishing) == (m + 1) * (m + 2) - 2


def test_basis_order_and_roundtrip():
    idx = JetBasisIndex(2)
    assert idx.elements[:4] == [(0, (0, 0)), (0, (0, 1)), (0, (1, 0)), (0, (0, 2))]
    v = vf(2, {(1, 0): 3, (0, 2): -1}, {(1, 1): F(1, 2)})
    assert idx.field(idx.coords(v)) == v
