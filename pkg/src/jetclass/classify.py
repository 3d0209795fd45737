"""Classification of planar germs at a singular point.

The linear part places a germ in one of five classes (hyperbolic, pure
imaginary pair, one zero eigenvalue, nonzero nilpotent, zero). Degenerate
classes are then refined through normal forms:

* pure imaginary pair: focus values from the rotational Poincare-Dulac form
  ``z (i*omega + sum a_j |z|^(2j))``,
* one zero eigenvalue: center-manifold reduction ``xdot = sum a_k x^k``,
* nilpotent: the reduced 2-jet ``y d/dx + (b11 x^2 + b12 xy + b22 y^2) d/dy``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import _poly, linalg
from .errors import InsufficientOrderError, JetError, PreconditionError
from .jets import DiffeoJet, PolyVF, bracket, pushforward
from .scalar import EXACT, FLOAT, rational_sqrt

__all__ = [
    "Tolerances",
    "LinearClass",
    "ClassLabel",
    "FocusValues",
    "SNReduction",
    "SNNormalForm",
    "BTCoefficients",
    "classify_linear",
    "rotation_normalize",
    "focus_values",
    "sn_reduce",
    "sn_normal_form",
    "bt_reduce",
    "classify_germ",
]


@dataclass(frozen=True)
class Tolerances:
    """Dead-zone thresholds for float-backend zero tests.

    A value is zero when ``|value| < zero * scale``, nonzero when
    ``|value| > nonzero * scale`` and unresolved in between; ``scale`` is the
    largest coefficient magnitude, over terms of degree at most the value's
    own degree, of the field the value was read from.
    """

    zero: float = 1e-9
    nonzero: float = 1e-6

    def __post_init__(self):
        if not (self.zero > 0 and self.nonzero > 0):
            raise ValueError("tolerances must be positive")
        if not self.zero < self.nonzero:
            raise ValueError("tol_zero must be smaller than tol_nonzero")


class LinearClass(str, Enum):
    HSTAR = "Hstar"
    AHSTAR = "AHstar"
    SNSTAR = "SNstar"
    BTSTAR = "BTstar"
    ZERO = "Zero"


@dataclass(frozen=True)
class ClassLabel:
    """Taxonomy value: ``H``, ``AH``, ``SN`` (with index ``k``), ``BT0``, ``BT1``, ``ZL`` or ``Unresolved``."""

    kind: str
    k: int | None = None
    payload: dict = dc_field(default_factory=dict, compare=False)
    reason: str | None = None
    order: int | None = None

    @property
    def name(self) -> str:
        return f"{self.kind}({self.k})" if self.k is not None else self.kind

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class FocusValues:
    omega: object
    re_a: list
    im_a: list
    backend: str
    normal_form: PolyVF | None = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SNReduction:
    lam: object
    center_manifold: list  # h_0 .. h_m of y = h(x); h_0 = h_1 = 0
    a: list  # a_1 .. a_m of the reduced equation; a_1 = 0
    field: PolyVF = dc_field(repr=False)
    transform: DiffeoJet = dc_field(repr=False)

    def coefficient(self, k: int):
        return self.a[k - 1]


@dataclass(frozen=True)
class SNNormalForm:
    lam: object
    a: list  # a_2 .. a_m
    b: list  # b_1 .. b_{m-1}
    field: PolyVF = dc_field(repr=False)


@dataclass(frozen=True)
class BTCoefficients:
    b11: object
    b12: object
    b22: object
    field: PolyVF = dc_field(repr=False)
    ambient_order: int = 2


# --------------------------------------------------------------------------- helpers

def _det_tr(A):
    (a, b), (c, d) = A
    return a * d - b * c, a + d


def _is_exact(A) -> bool:
    return all(not isinstance(e, float) for row in A for e in row)


def _state(value, scale: float, tol: Tolerances | None, exact: bool) -> str:
    """'zero', 'nonzero' or 'ambiguous'."""
    if exact:
        return "zero" if value == 0 else "nonzero"
    mag = abs(float(value))
    scale = scale if scale > 0 else 1.0
    if mag < tol.zero * scale:
        return "zero"
    if mag > tol.nonzero * scale:
        return "nonzero"
    return "ambiguous"


def classify_linear(A, tol: float = 1e-9) -> LinearClass:
    """Place a 2x2 matrix in the partition Hstar | AHstar | SNstar | BTstar | Zero.

    Exact for Fraction/int entries; float entries use the relative tolerance
    ``tol`` (trace against ``max|a_ij|``, determinant against its square).
    """
    det, tr = _det_tr(A)
    if _is_exact(A):
        if all(e == 0 for row in A for e in row):
            return LinearClass.ZERO
        tr_zero, det_zero = tr == 0, det == 0
    else:
        s = max(abs(float(e)) for row in A for e in row)
        if s == 0:
            return LinearClass.ZERO
        tr_zero = abs(tr) <= tol * s
        det_zero = abs(det) <= tol * s * s
    if det_zero and tr_zero:
        return LinearClass.BTSTAR
    if det_zero:
        return LinearClass.SNSTAR
    if tr_zero and det > 0:
        return LinearClass.AHSTAR
    return LinearClass.HSTAR


def _inv2(T):
    (a, b), (c, d) = T
    det = a * d - b * c
    return [[d / det, -b / det], [-c / det, a / det]]


def _linear_change(v: PolyVF, T, order: int) -> tuple:
    """Express ``v`` in coordinates ``xi = T^{-1} x`` (columns of T are the new axes)."""
    h = DiffeoJet.linear(_inv2(T), order=order, backend=v.backend)
    return pushforward(h, v, order), h


def _set_linear(w: PolyVF, A) -> PolyVF:
    """Replace the linear part of ``w`` by ``A`` (float projection onto a normal form)."""
    (a, b), (c, d) = A
    dx = {m: c_ for m, c_ in w.dx.items() if m[0] + m[1] != 1}
    dy = {m: c_ for m, c_ in w.dy.items() if m[0] + m[1] != 1}
    dx.update({(1, 0): a, (0, 1): b})
    dy.update({(1, 0): c, (0, 1): d})
    return PolyVF(w.order, dx, dy, backend=w.backend)


def _homogeneous_basis(d: int) -> list:
    return [(comp, (i, d - i)) for comp in (0, 1) for i in range(d + 1)]


def _monomial_field(comp, mono, order, backend, coeff=1) -> PolyVF:
    c = Fraction(coeff) if backend == EXACT else float(coeff)
    return PolyVF(order, {mono: c} if comp == 0 else {}, {mono: c} if comp == 1 else {},
                  backend=backend)


def _poincare_dulac(w: PolyVF, order: int, resonant) -> tuple:
    """Remove non-resonant terms degree by degree.

    ``resonant(d)`` lists homogeneous degree-``d`` fields spanning a complement
    of the image of ``ad`` of the linear part. For each degree the system
    ``[lin, h] + sum r_i R_i = w_d`` is solved; the change ``x -> x - h`` then
    leaves exactly ``sum r_i R_i`` in degree ``d``. Returns the normalized
    field and ``{d: [r_i]}``.
    """
    backend = w.backend
    lin = w.truncate(1).homogeneous(1)
    coeffs = {}
    for d in range(2, order + 1):
        basis = _homogeneous_basis(d)
        pos = {e: n for n, e in enumerate(basis)}
        cols = []
        for comp, mono in basis:
            img = bracket(lin.with_order(order), _monomial_field(comp, mono, order, backend), d)
            col = [0] * len(basis)
            for c in (0, 1):
                for m, val in img.component(c).items():
                    col[pos[(c, m)]] = val
            cols.append(col)
        res_fields = resonant(d)
        for R in res_fields:
            col = [0] * len(basis)
            for c in (0, 1):
                for m, val in R.component(c).items():
                    col[pos[(c, m)]] = val
            cols.append(col)
        rhs = [w.component(c).get(m, 0) for c, m in basis]
        nh = len(basis)
        if backend == EXACT:
            rows = [[cols[j][i] for j in range(len(cols))] for i in range(nh)]
            sol = linalg.solve(rows, rhs)
            if sol is None:
                raise PreconditionError(f"homological equation unsolvable in degree {d}")
        else:
            M = np.array(cols, dtype=float).T
            sol = np.linalg.lstsq(M, np.array(rhs, dtype=float), rcond=None)[0].tolist()
        coeffs[d] = sol[nh:]
        hx = {m: -s for (c, m), s in zip(basis, sol[:nh]) if c == 0 and s != 0}
        hy = {m: -s for (c, m), s in zip(basis, sol[:nh]) if c == 1 and s != 0}
        if not hx and not hy:
            continue
        one = Fraction(1) if backend == EXACT else 1.0
        hx[(1, 0)] = hx.get((1, 0), 0) + one
        hy[(0, 1)] = hy.get((0, 1), 0) + one
        w = pushforward(DiffeoJet(order, hx, hy, backend=backend), w, order)
    return w, coeffs


# ------------------------------------------------------------------------ AH branch

def rotation_normalize(v: PolyVF, tol: float = 1e-9, check: bool = True) -> tuple:
    """Bring the linear part of an AH germ to ``(-omega*y, omega*x)``, ``omega > 0``.

    Returns ``(w, h, omega)`` with ``w = h_* v``. Exact when ``det`` is the
    square of a rational; otherwise the float backend is used.
    """
    A = v.linear_part()
    if check and classify_linear(A, tol) is not LinearClass.AHSTAR:
        raise PreconditionError("rotation_normalize needs a linear part with a pure imaginary pair")
    det, _ = _det_tr(A)
    if det <= 0:
        raise PreconditionError("rotation_normalize needs det > 0")
    omega = rational_sqrt(Fraction(det)) if v.backend == EXACT else None
    if omega is None:
        v = v.to_float()
        A = v.linear_part()
        det, _ = _det_tr(A)
        omega = math.sqrt(det)
    (a, b), (c, d) = A
    # first axis e1, second axis A e1 / omega; pick e1 to keep the change well conditioned
    if abs(c) >= abs(b):
        T = [[1, a / omega], [0, c / omega]]
    else:
        T = [[0, b / omega], [1, d / omega]]
    if v.backend == EXACT:
        T = [[Fraction(e) for e in row] for row in T]
    else:
        T = [[float(e) for e in row] for row in T]
    w, h = _linear_change(v, T, v.order)
    if w.backend == FLOAT:
        w = _set_linear(w, [[0.0, -omega], [omega, 0.0]])
    return w, h, omega


def _ah_resonant(backend):
    def fields(d):
        if d % 2 == 0:
            return []
        j = (d - 1) // 2
        # r^(2j) (x, y) and r^(2j) (-y, x)
        r2j = {(2 * i, 2 * (j - i)): math.comb(j, i) for i in range(j + 1)}
        rx = _poly.mul(r2j, {(1, 0): 1})
        ry = _poly.mul(r2j, {(0, 1): 1})
        conv = Fraction if backend == EXACT else float
        radial = PolyVF(d, {m: conv(c) for m, c in rx.items()}, {m: conv(c) for m, c in ry.items()},
                        backend=backend)
        angular = PolyVF(d, {m: conv(-c) for m, c in ry.items()}, {m: conv(c) for m, c in rx.items()},
                         backend=backend)
        return [radial, angular]
    return fields


def focus_values(v: PolyVF, k_max: int, tol: float = 1e-9, check: bool = True) -> FocusValues:
    """Coefficients ``a_1 .. a_{k_max}`` of the rotational normal form.

    ``re_a[j-1]`` is the j-th focus value (up to the positive factors fixed by
    the normalization, only its sign and vanishing are invariant).
    """
    if k_max < 1:
        raise JetError("k_max must be >= 1")
    need = 2 * k_max + 1
    if v.order < need:
        raise InsufficientOrderError(f"focus values up to a_{k_max} need order >= {need}, got {v.order}")
    w, _, omega = rotation_normalize(v.truncate(need), tol, check)
    w, coeffs = _poincare_dulac(w, need, _ah_resonant(w.backend))
    re_a = [coeffs[2 * j + 1][0] for j in range(1, k_max + 1)]
    im_a = [coeffs[2 * j + 1][1] for j in range(1, k_max + 1)]
    return FocusValues(omega, re_a, im_a, w.backend, normal_form=w)


# ------------------------------------------------------------------------ SN branch

def _sn_diagonalize(v: PolyVF, m: int, tol: float, check: bool) -> tuple:
    A = v.linear_part()
    if check and classify_linear(A, tol) is not LinearClass.SNSTAR:
        raise PreconditionError("saddle-node reduction needs exactly one zero eigenvalue")
    (a, b), (c, d) = A
    lam = a + d
    # the image of A is the lam-eigenline; the kernel is orthogonal to a nonzero row
    # scaled by 1/lam so that an already diagonal linear part keeps T = I
    u1 = (a / lam, c / lam) if abs(a) + abs(c) >= abs(b) + abs(d) else (b / lam, d / lam)
    u0 = (b / lam, -a / lam) if abs(a) + abs(b) >= abs(c) + abs(d) else (d / lam, -c / lam)
    T = [[u0[0], u1[0]], [u0[1], u1[1]]]
    w, h = _linear_change(v.truncate(m), T, m)
    if w.backend == FLOAT:
        w = _set_linear(w, [[0.0, 0.0], [0.0, float(lam)]])
    return w, h, lam


def sn_reduce(v: PolyVF, m: int | None = None, tol: float = 1e-9, check: bool = True) -> SNReduction:
    """Center-manifold reduction of a saddle-node germ through order ``m``.

    Diagonalizes the linear part to ``diag(0, lam)``, solves the invariance
    equation ``h'(x) xdot(x, h(x)) = ydot(x, h(x))`` for ``y = h(x)`` order by
    order and returns the restricted equation ``xdot = sum a_k x^k``.
    """
    m = v.order if m is None else m
    if v.order < m:
        raise InsufficientOrderError(f"order {m} requested from a jet of order {v.order}")
    if m < 2:
        raise InsufficientOrderError("saddle-node reduction needs order >= 2")
    w, h, lam = _sn_diagonalize(v, m, tol, check)
    f = {mo: c for mo, c in w.dx.items() if mo[0] + mo[1] >= 2}
    g = {mo: c for mo, c in w.dy.items() if mo[0] + mo[1] >= 2}
    one = Fraction(1) if w.backend == EXACT else 1.0
    zero = one * 0
    hs = {}
    xvar = {(1, 0): one}
    for n in range(2, m + 1):
        hy = {(k, 0): c for k, c in hs.items()}
        fr = _poly.compose(f, xvar, hy, m, one)
        gr = _poly.compose(g, xvar, hy, m, one)
        dh = _poly.diff(hy, 0)
        resid = _poly.add(_poly.mul(dh, fr, m), gr, -1)
        resid = _poly.add(resid, _poly.scale(hy, lam), -1)
        hs[n] = resid.get((n, 0), zero) / lam
    hy = {(k, 0): c for k, c in hs.items() if c != 0}
    fr = _poly.compose(f, xvar, hy, m, one)
    a = [fr.get((k, 0), zero) for k in range(1, m + 1)]
    cm = [zero, zero] + [hs.get(n, zero) for n in range(2, m + 1)]
    return SNReduction(lam, cm, a, w, h)


def sn_normal_form(v: PolyVF, m: int | None = None, tol: float = 1e-9,
                   check: bool = True) -> SNNormalForm:
    """Full normal form ``(sum a_k x^k) d/dx + y (lam + sum b_k x^k) d/dy`` through order ``m``."""
    m = v.order if m is None else m
    w, _, lam = _sn_diagonalize(v, m, tol, check)
    backend = w.backend

    def resonant(d):
        return [_monomial_field(0, (d, 0), m, backend), _monomial_field(1, (d - 1, 1), m, backend)]

    w, coeffs = _poincare_dulac(w, m, resonant)
    a = [coeffs[d][0] for d in range(2, m + 1)]
    b = [coeffs[d][1] for d in range(2, m + 1)]
    return SNNormalForm(lam, a, b, w)


# ------------------------------------------------------------------------ BT branch

def bt_reduce(v: PolyVF, tol: float = 1e-9, check: bool = True) -> BTCoefficients:
    """Reduce a nilpotent germ's 2-jet to ``y d/dx + (b11 x^2 + b12 xy + b22 y^2) d/dy``."""
    if v.order < 2:
        raise InsufficientOrderError("BT reduction needs a 2-jet")
    A = v.linear_part()
    if check and classify_linear(A, tol) is not LinearClass.BTSTAR:
        raise PreconditionError("BT reduction needs a nonzero nilpotent linear part")
    (a, b), (c, d) = A
    # e2 outside the kernel, e1 = A e2; in the basis (e1, e2) A is [[0, 1], [0, 0]]
    if abs(a) + abs(c) >= abs(b) + abs(d):
        e2, e1 = (1, 0), (a, c)
    else:
        e2, e1 = (0, 1), (b, d)
    conv = Fraction if v.backend == EXACT else float
    T = [[conv(e1[0]), conv(e2[0])], [conv(e1[1]), conv(e2[1])]]
    w, _ = _linear_change(v.truncate(2), T, 2)
    if w.backend == FLOAT:
        w = _set_linear(w, [[0.0, 1.0], [0.0, 0.0]])
    one = conv(1)
    sub = DiffeoJet(2, {(1, 0): one}, dict(w.dx), backend=w.backend)
    r = pushforward(sub, w, 2)
    if w.backend == FLOAT:
        r = PolyVF(2, {(0, 1): 1.0}, dict(r.dy), backend=FLOAT)
    zero = conv(0)
    return BTCoefficients(r.dy.get((2, 0), zero), r.dy.get((1, 1), zero), r.dy.get((0, 2), zero), r,
                          ambient_order=v.order)


# ------------------------------------------------------------------------ dispatcher

def _unresolved(reason, order, **payload):
    return ClassLabel("Unresolved", None, payload, reason, order)


def _first_nonzero(values, scales, tol, exact):
    """Index of the first clearly nonzero value, or ('ambiguous'|'none', idx)."""
    for n, (val, scale) in enumerate(zip(values, scales)):
        st = _state(val, scale, tol, exact)
        if st == "nonzero":
            return "found", n
        if st == "ambiguous":
            return "ambiguous", n
    return "none", len(values)


def classify_germ(v: PolyVF, tol: Tolerances | None = None) -> ClassLabel:
    """Label a germ with ``v(0) = 0`` as H, AH(k), SN(k), BT0, BT1, ZL or Unresolved."""
    tol = tol or Tolerances()
    exact = v.backend == EXACT
    order = v.order
    # Dead-zone scales are taken degree by degree: coefficients of degree d
    # scale like c^(d-1) under x -> c x, so an invariant of degree d is only
    # compared with coefficients of degree <= d.
    scale = v.max_abs(1)
    const = v.constant()
    if exact:
        if any(c != 0 for c in const):
            raise JetError("germ has a nonzero constant term (origin is not a singular point)")
    else:
        if any(abs(c) >= tol.zero * max(scale, 1.0) for c in const):
            raise JetError("germ has a nonzero constant term (origin is not a singular point)")
        if any(c != 0 for c in const):
            v = PolyVF(order, {m: c for m, c in v.dx.items() if m != (0, 0)},
                       {m: c for m, c in v.dy.items() if m != (0, 0)}, backend=FLOAT)

    A = v.linear_part()
    det, tr = _det_tr(A)
    lin_payload = {"det": det, "tr": tr}
    if exact:
        lc = classify_linear(A)
    else:
        s = max(abs(float(e)) for row in A for e in row)
        if s == 0 or s < tol.zero * max(v.max_abs(2), 1.0):
            lc = LinearClass.ZERO
        else:
            st_tr = _state(tr, s, tol, False)
            st_det = _state(det, s * s, tol, False)
            if "ambiguous" in (st_tr, st_det):
                return _unresolved("linear invariants inside the numeric dead zone", order, **lin_payload)
            if st_det == "zero" and st_tr == "zero":
                lc = LinearClass.BTSTAR
            elif st_det == "zero":
                lc = LinearClass.SNSTAR
            elif st_tr == "zero" and det > 0:
                lc = LinearClass.AHSTAR
            else:
                lc = LinearClass.HSTAR

    if lc is LinearClass.HSTAR:
        return ClassLabel("H", None, lin_payload, order=order)
    if lc is LinearClass.ZERO:
        return ClassLabel("ZL", None, lin_payload, order=order)

    if lc is LinearClass.AHSTAR:
        k_max = (order - 1) // 2
        if k_max < 1:
            return _unresolved("jet order insufficient for focus values", order, **lin_payload)
        fv = focus_values(v, k_max, check=False)
        fx = fv.backend == EXACT
        payload = {"omega": fv.omega, "re_a": list(fv.re_a), "im_a": list(fv.im_a)}
        scales = [fv.normal_form.max_abs(2 * j + 1) for j in range(1, len(fv.re_a) + 1)]
        status, n = _first_nonzero(fv.re_a, scales, tol, fx)
        if status == "found":
            return ClassLabel("AH", n, payload, order=order)
        reason = ("focus value inside the numeric dead zone" if status == "ambiguous"
                  else "jet order insufficient: all computed focus values vanish")
        return _unresolved(reason, order, **payload)

    if lc is LinearClass.SNSTAR:
        if order < 2:
            return _unresolved("jet order insufficient for the center-manifold reduction", order,
                               **lin_payload)
        red = sn_reduce(v, order, check=False)
        payload = {"lam": red.lam, "a": list(red.a), "h": list(red.center_manifold)}
        scales = [red.field.max_abs(d) for d in range(2, len(red.a) + 1)]
        status, n = _first_nonzero(red.a[1:], scales, tol, exact)
        if status == "found":
            return ClassLabel("SN", n, payload, order=order)
        reason = ("center-manifold coefficient inside the numeric dead zone" if status == "ambiguous"
                  else "jet order insufficient: all reduced coefficients vanish")
        return _unresolved(reason, order, **payload)

    # nilpotent
    if order < 2:
        return _unresolved("jet order insufficient for the BT 2-jet", order, **lin_payload)
    bt = bt_reduce(v, check=False)
    payload = {"b11": bt.b11, "b12": bt.b12, "b22": bt.b22}
    bscale = bt.field.max_abs(2)
    s11 = _state(bt.b11, bscale, tol, exact)
    s12 = _state(bt.b12, bscale, tol, exact)
    if s11 == "nonzero" and s12 == "nonzero":
        return ClassLabel("BT0", None, payload, order=order)
    if "zero" in (s11, s12):
        return ClassLabel("BT1", None, payload, order=order)
    return _unresolved("BT coefficient inside the numeric dead zone", order, **payload)
