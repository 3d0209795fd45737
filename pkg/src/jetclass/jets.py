"""Truncated polynomial vector fields on the plane and the jet group acting on them.

A :class:`PolyVF` is the degree-``order`` Taylor polynomial of a vector field at
the origin; a :class:`DiffeoJet` is a jet of a diffeomorphism fixing the origin.
Both are immutable and carry a scalar backend (``"exact"`` or ``"float"``).
"""
from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

from . import _poly
from .errors import JetError, SingularLinearPartError
from .scalar import EXACT, FLOAT, check_same, coerce, common_backend

__all__ = [
    "PolyVF",
    "DiffeoJet",
    "JetBasisIndex",
    "bracket",
    "pushforward",
    "invert_jet",
    "compose",
    "linear_part",
]


def _normalize(poly: Mapping | None, backend: str, order: int | None, what: str) -> dict:
    out = {}
    for key, c in (poly or {}).items():
        i, j = key
        if not (isinstance(i, int) and isinstance(j, int)) or i < 0 or j < 0:
            raise JetError(f"bad exponent pair {key!r} in {what}")
        if order is not None and i + j > order:
            raise JetError(f"monomial x^{i} y^{j} in {what} exceeds order {order}")
        c = coerce(c, backend)
        if c != 0:
            out[(i, j)] = out.get((i, j), 0) + c
    return {m: c for m, c in out.items() if c != 0}


class PolyVF:
    """A vector field ``dx(x, y) d/dx + dy(x, y) d/dy`` truncated at total degree ``order``.

    Parameters
    ----------
    order : int
        Jet order m >= 1 (a zero order is allowed for constant fields).
    dx, dy : mapping
        Sparse maps ``(i, j) -> coefficient`` of x^i y^j. Coefficients may be
        ``Fraction``/``int`` (exact backend) or ``float`` (float backend).
    backend : str, optional
        Forces the backend; needed for fields with only integer or no coefficients.
    """

    __slots__ = ("order", "backend", "_dx", "_dy")

    def __init__(self, order: int, dx: Mapping | None = None, dy: Mapping | None = None,
                 backend: str | None = None):
        if not isinstance(order, int) or order < 0:
            raise JetError(f"order must be a nonnegative integer, got {order!r}")
        values = list((dx or {}).values()) + list((dy or {}).values())
        inferred = common_backend(values, default=backend or EXACT)
        if backend is not None:
            check_same(backend, inferred)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "backend", inferred)
        object.__setattr__(self, "_dx", MappingProxyType(_normalize(dx, inferred, order, "dx")))
        object.__setattr__(self, "_dy", MappingProxyType(_normalize(dy, inferred, order, "dy")))

    def __setattr__(self, name, value):
        raise AttributeError("PolyVF is immutable")

    # ------------------------------------------------------------------ access
    @property
    def dx(self) -> Mapping:
        return self._dx

    @property
    def dy(self) -> Mapping:
        return self._dy

    def component(self, c: int) -> Mapping:
        return self._dx if c == 0 else self._dy

    @property
    def terms(self) -> dict:
        """Map ``(component, (i, j)) -> coefficient`` with components 1 and 2."""
        out = {(1, m): c for m, c in self._dx.items()}
        out.update({(2, m): c for m, c in self._dy.items()})
        return out

    @classmethod
    def zero(cls, order: int, backend: str = EXACT) -> "PolyVF":
        return cls(order, backend=backend)

    @classmethod
    def linear(cls, matrix, order: int = 1, backend: str | None = None) -> "PolyVF":
        (a, b), (c, d) = matrix
        return cls(order, {(1, 0): a, (0, 1): b}, {(1, 0): c, (0, 1): d}, backend=backend)

    def degree(self) -> int:
        return max(_poly.degree(dict(self._dx)), _poly.degree(dict(self._dy)))

    def is_zero(self) -> bool:
        return not self._dx and not self._dy

    def constant(self) -> tuple:
        zero = coerce(0, self.backend)
        return (self._dx.get((0, 0), zero), self._dy.get((0, 0), zero))

    def linear_part(self) -> list:
        zero = coerce(0, self.backend)
        return [[self._dx.get((1, 0), zero), self._dx.get((0, 1), zero)],
                [self._dy.get((1, 0), zero), self._dy.get((0, 1), zero)]]

    def homogeneous(self, d: int) -> "PolyVF":
        return PolyVF(self.order, _poly.homogeneous(self._dx, d), _poly.homogeneous(self._dy, d),
                      backend=self.backend)

    def truncate(self, m: int) -> "PolyVF":
        return PolyVF(m, _poly.truncate(self._dx, m), _poly.truncate(self._dy, m),
                      backend=self.backend)

    def with_order(self, m: int) -> "PolyVF":
        """Same polynomial re-declared at order ``m`` (truncating if ``m`` is smaller)."""
        return self.truncate(m)

    def evaluate(self, x, y) -> tuple:
        return (_poly.evaluate(self._dx, x, y), _poly.evaluate(self._dy, x, y))

    def max_abs(self, max_degree: int | None = None) -> float:
        """Largest coefficient magnitude, optionally over terms of degree <= ``max_degree``."""
        if max_degree is None:
            return max(_poly.max_abs(self._dx), _poly.max_abs(self._dy))
        return max(_poly.max_abs(_poly.truncate(self._dx, max_degree)),
                   _poly.max_abs(_poly.truncate(self._dy, max_degree)))

    def to_float(self) -> "PolyVF":
        return PolyVF(self.order, {m: float(c) for m, c in self._dx.items()},
                      {m: float(c) for m, c in self._dy.items()}, backend=FLOAT)

    def to_exact(self) -> "PolyVF":
        return PolyVF(self.order, {m: Fraction(c) for m, c in self._dx.items()},
                      {m: Fraction(c) for m, c in self._dy.items()}, backend=EXACT)

    # -------------------------------------------------------------- arithmetic
    def _combine(self, other: "PolyVF", alpha) -> "PolyVF":
        if not isinstance(other, PolyVF):
            return NotImplemented
        backend = check_same(self.backend, other.backend)
        return PolyVF(max(self.order, other.order),
                      _poly.add(dict(self._dx), dict(other._dx), alpha),
                      _poly.add(dict(self._dy), dict(other._dy), alpha), backend=backend)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "PolyVF":
        c = coerce(c, self.backend)
        return PolyVF(self.order, _poly.scale(dict(self._dx), c), _poly.scale(dict(self._dy), c),
                      backend=self.backend)

    def __mul__(self, c):
        if isinstance(c, PolyVF):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    # ----------------------------------------------------------------- dunder
    def __eq__(self, other):
        if not isinstance(other, PolyVF):
            return NotImplemented
        return (self.order == other.order and self.backend == other.backend
                and dict(self._dx) == dict(other._dx) and dict(self._dy) == dict(other._dy))

    def __hash__(self):
        return hash((self.order, self.backend, frozenset(self._dx.items()),
                     frozenset(self._dy.items())))

    def __repr__(self):
        return f"PolyVF(order={self.order}, dx={dict(self._dx)!r}, dy={dict(self._dy)!r})"

    def __str__(self):
        def fmt(p):
            if not p:
                return "0"
            parts = []
            for (i, j), c in sorted(p.items(), key=lambda t: (t[0][0] + t[0][1], -t[0][0])):
                mono = "*".join(s for s in (
                    ("x" if i == 1 else f"x^{i}") if i else "",
                    ("y" if j == 1 else f"y^{j}") if j else "") if s)
                parts.append(f"{c}" + (f"*{mono}" if mono else ""))
            return " + ".join(parts)
        return f"({fmt(self._dx)}, {fmt(self._dy)})"


class DiffeoJet:
    """An ``order``-jet of a diffeomorphism ``(R^2, 0) -> (R^2, 0)``."""

    __slots__ = ("order", "backend", "hx", "hy")

    def __init__(self, order: int, hx: Mapping, hy: Mapping, backend: str | None = None):
        if not isinstance(order, int) or order < 1:
            raise JetError(f"diffeomorphism jet order must be >= 1, got {order!r}")
        inferred = common_backend(list(hx.values()) + list(hy.values()), default=backend or EXACT)
        if backend is not None:
            check_same(backend, inferred)
        px = _normalize(hx, inferred, order, "hx")
        py = _normalize(hy, inferred, order, "hy")
        if (0, 0) in px or (0, 0) in py:
            raise JetError("diffeomorphism jet must fix the origin (no constant term)")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "backend", inferred)
        object.__setattr__(self, "hx", MappingProxyType(px))
        object.__setattr__(self, "hy", MappingProxyType(py))
        if self.det() == 0:
            raise SingularLinearPartError("linear part of the diffeomorphism jet is singular")

    def __setattr__(self, name, value):
        raise AttributeError("DiffeoJet is immutable")

    @classmethod
    def identity(cls, order: int, backend: str = EXACT) -> "DiffeoJet":
        one = coerce(1, backend)
        return cls(order, {(1, 0): one}, {(0, 1): one}, backend=backend)

    @classmethod
    def linear(cls, matrix, order: int = 1, backend: str | None = None) -> "DiffeoJet":
        (a, b), (c, d) = matrix
        return cls(order, {(1, 0): a, (0, 1): b}, {(1, 0): c, (0, 1): d}, backend=backend)

    def linear_matrix(self) -> list:
        z = coerce(0, self.backend)
        return [[self.hx.get((1, 0), z), self.hx.get((0, 1), z)],
                [self.hy.get((1, 0), z), self.hy.get((0, 1), z)]]

    def det(self):
        (a, b), (c, d) = self.linear_matrix()
        return a * d - b * c

    def truncate(self, m: int) -> "DiffeoJet":
        return DiffeoJet(m, _poly.truncate(self.hx, m), _poly.truncate(self.hy, m),
                         backend=self.backend)

    def as_field(self) -> PolyVF:
        """The pair of component polynomials viewed as a PolyVF (for comparisons)."""
        return PolyVF(self.order, self.hx, self.hy, backend=self.backend)

    def __eq__(self, other):
        if not isinstance(other, DiffeoJet):
            return NotImplemented
        return (self.order == other.order and self.backend == other.backend
                and dict(self.hx) == dict(other.hx) and dict(self.hy) == dict(other.hy))

    def __hash__(self):
        return hash((self.order, frozenset(self.hx.items()), frozenset(self.hy.items())))

    def __repr__(self):
        return f"DiffeoJet(order={self.order}, hx={dict(self.hx)!r}, hy={dict(self.hy)!r})"


def linear_part(v: PolyVF) -> list:
    """2x2 matrix of degree-1 coefficients, rows indexed by component."""
    return v.linear_part()


def bracket(v: PolyVF, w: PolyVF, m: int | None = None) -> PolyVF:
    """Lie bracket ``Dw.v - Dv.w`` of the polynomial representatives, truncated at ``m``.

    ``m=None`` uses ``min(v.order, w.order)``. Pass a larger ``m`` to keep
    more of the untruncated product (used for exact commutation tests).
    """
    backend = check_same(v.backend, w.backend)
    if m is None:
        m = min(v.order, w.order)
    if m < 0:
        raise JetError("bracket order must be nonnegative")
    vx, vy, wx, wy = dict(v.dx), dict(v.dy), dict(w.dx), dict(w.dy)
    out = []
    for wc, vc in ((wx, vx), (wy, vy)):
        term = _poly.add(_poly.mul(_poly.diff(wc, 0), vx, m), _poly.mul(_poly.diff(wc, 1), vy, m))
        term = _poly.add(term, _poly.mul(_poly.diff(vc, 0), wx, m), -1)
        term = _poly.add(term, _poly.mul(_poly.diff(vc, 1), wy, m), -1)
        out.append(term)
    return PolyVF(m, out[0], out[1], backend=backend)


def compose(g: DiffeoJet, h: DiffeoJet) -> DiffeoJet:
    """Jet of ``g o h`` truncated to the common order."""
    backend = check_same(g.backend, h.backend)
    if g.order != h.order:
        raise JetError(f"compose needs equal orders, got {g.order} and {h.order}")
    m = g.order
    one = coerce(1, backend)
    hx, hy = dict(h.hx), dict(h.hy)
    return DiffeoJet(m, _poly.compose(dict(g.hx), hx, hy, m, one),
                     _poly.compose(dict(g.hy), hx, hy, m, one), backend=backend)


def _inverse_matrix(mat, backend):
    (a, b), (c, d) = mat
    det = a * d - b * c
    if det == 0:
        raise SingularLinearPartError("singular linear part")
    if backend == EXACT:
        det = Fraction(det)
    return [[d / det, -b / det], [-c / det, a / det]]


def invert_jet(h: DiffeoJet) -> DiffeoJet:
    """Compositional inverse of ``h`` through order ``h.order``.

    Fixed-point iteration ``k <- L^{-1}(id - N o k)`` with ``h = L + N``; each
    pass fixes one more degree.
    """
    m, backend = h.order, h.backend
    one = coerce(1, backend)
    (p, q), (r, s) = _inverse_matrix(h.linear_matrix(), backend)
    nx = {mono: c for mono, c in h.hx.items() if mono[0] + mono[1] >= 2}
    ny = {mono: c for mono, c in h.hy.items() if mono[0] + mono[1] >= 2}
    kx = _poly.clean({(1, 0): p, (0, 1): q})
    ky = _poly.clean({(1, 0): r, (0, 1): s})
    for _ in range(m - 1):
        ux = _poly.compose(nx, kx, ky, m, one)
        uy = _poly.compose(ny, kx, ky, m, one)
        # k = L^{-1} (id - N(k))
        ix = _poly.add({(1, 0): one}, ux, -1)
        iy = _poly.add({(0, 1): one}, uy, -1)
        kx = _poly.add(_poly.scale(ix, p), _poly.scale(iy, q))
        ky = _poly.add(_poly.scale(ix, r), _poly.scale(iy, s))
    return DiffeoJet(m, kx, ky, backend=backend)


def pushforward(h: DiffeoJet, v: PolyVF, m: int | None = None) -> PolyVF:
    """``m``-jet of ``(Dh . v) o h^{-1}``.

    Exact through order ``m`` when ``v(0) = 0``; with a nonzero constant term
    the top degree would also need the ``(m+1)``-jet of ``h``.
    """
    backend = check_same(h.backend, v.backend)
    if m is None:
        m = v.order
    if h.order < m or v.order < m:
        raise JetError(f"pushforward to order {m} needs h.order and v.order >= {m}")
    one = coerce(1, backend)
    hm = h if h.order == m else h.truncate(m)
    inv = invert_jet(hm)
    vx, vy = _poly.truncate(v.dx, m), _poly.truncate(v.dy, m)
    out = []
    for hc in (dict(hm.hx), dict(hm.hy)):
        dv = _poly.add(_poly.mul(_poly.diff(hc, 0), vx, m), _poly.mul(_poly.diff(hc, 1), vy, m))
        out.append(_poly.compose(dv, dict(inv.hx), dict(inv.hy), m, one))
    return PolyVF(m, out[0], out[1], backend=backend)


class JetBasisIndex:
    """Enumeration of monomial fields ``x^i y^j d_c`` with ``i + j <= order``.

    Ordered by (component, total degree, lexicographic (i, j)).
    """

    def __init__(self, order: int):
        if order < 0:
            raise JetError("order must be nonnegative")
        self.order = order
        self.elements: list = []
        for comp in (0, 1):
            for d in range(order + 1):
                for i in range(d + 1):
                    self.elements.append((comp, (i, d - i)))
        self._pos = {e: n for n, e in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator:
        return iter(self.elements)

    def index(self, comp: int, mono: tuple) -> int:
        return self._pos[(comp, tuple(mono))]

    @property
    def vanishing(self) -> list:
        """Indices of basis fields vanishing at 0 (degree >= 1); spans the Lie algebra of D^m."""
        return [n for n, (_, (i, j)) in enumerate(self.elements) if i + j >= 1]

    def degree_indices(self, d: int) -> list:
        return [n for n, (_, (i, j)) in enumerate(self.elements) if i + j == d]

    def basis_field(self, n: int, backend: str = EXACT) -> PolyVF:
        comp, mono = self.elements[n]
        one = coerce(1, backend)
        polys = ({mono: one}, {}) if comp == 0 else ({}, {mono: one})
        return PolyVF(self.order, *polys, backend=backend)

    def coords(self, v: PolyVF) -> list:
        if v.degree() > self.order:
            raise JetError(f"field of degree {v.degree()} does not fit basis of order {self.order}")
        zero = coerce(0, v.backend)
        return [v.component(c).get(mono, zero) for c, mono in self.elements]

    def field(self, coords: Sequence, backend: str | None = None) -> PolyVF:
        dx, dy = {}, {}
        for (comp, mono), c in zip(self.elements, coords):
            if c != 0:
                (dx if comp == 0 else dy)[mono] = c
        return PolyVF(self.order, dx, dy, backend=backend)
