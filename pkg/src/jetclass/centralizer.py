"""Adjoint operator ``w -> [v, w]`` on jet space: centralizers and orbit codimensions.

Everything here is exact (Fraction) linear algebra; float fields are refused
because kernel dimensions must be certified.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import JetError
from .jets import JetBasisIndex, PolyVF, bracket
from .scalar import EXACT

__all__ = [
    "AdMatrix",
    "CentralizerResult",
    "StratumTangent",
    "ad_matrix",
    "centralizer_dim",
    "orbit_rank",
    "orbit_codim",
    "ah_normal_form",
    "sn_normal_form_field",
    "bt_normal_form",
    "ah_stratum",
    "sn_stratum",
    "bt_stratum",
    "sample_stratum",
    "BT_VARIANTS",
    "rotation_field",
    "y_scaling_field",
    "span_equal",
    "codim_table",
]


def _require_exact(v: PolyVF):
    if v.backend != EXACT:
        raise JetError("centralizer computations need the exact backend (ranks must be certified)")


@dataclass(frozen=True)
class AdMatrix:
    """Matrix of ``w -> [v, w]`` on J^m; column n is the image of basis field n."""

    order: int
    rows: list
    index: JetBasisIndex = field(repr=False)

    @property
    def shape(self) -> tuple:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def apply(self, coords: Sequence) -> list:
        return [sum((a * c for a, c in zip(row, coords) if a and c), Fraction(0)) for row in self.rows]


@dataclass(frozen=True)
class CentralizerResult:
    dim: int
    basis: list
    order: int
    truncated: bool
    restrict_vanishing: bool


def ad_matrix(v: PolyVF, m: int) -> AdMatrix:
    """Matrix of ``ad_v`` on J^m (constants included), truncated at degree ``m``."""
    _require_exact(v)
    if v.constant() != (0, 0):
        raise JetError("ad_matrix needs a field vanishing at the origin")
    idx = JetBasisIndex(m)
    vm = v.truncate(m)
    cols = [idx.coords(bracket(vm, idx.basis_field(n), m)) for n in range(len(idx))]
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(len(idx))]
    return AdMatrix(m, rows, idx)


def centralizer_dim(v: PolyVF, m: int, restrict_vanishing: bool = False,
                    truncated: bool = False) -> CentralizerResult:
    """Dimension and exact basis of the centralizer of ``v`` among degree-<=m jets.

    By default ``w`` must commute with ``v`` exactly as polynomials (the
    degree-<=m representatives). With ``truncated=True`` only the bracket's
    terms through degree ``m`` are required to vanish, i.e. the kernel of
    :func:`ad_matrix`; this is the Lie algebra of the jet stabilizer and is
    larger than the exact centralizer by free top-degree resonant terms.
    ``restrict_vanishing`` confines ``w`` to jets vanishing at 0.
    """
    _require_exact(v)
    idx = JetBasisIndex(m)
    cols_idx = idx.vanishing if restrict_vanishing else list(range(len(idx)))
    vm = v.truncate(m)
    out_order = m if truncated else max(m, vm.degree() + m - 1)
    out_idx = JetBasisIndex(out_order)
    cols = [out_idx.coords(bracket(vm, idx.basis_field(n), out_order)) for n in cols_idx]
    nz_rows = [i for i in range(len(out_idx)) if any(col[i] for col in cols)]
    rows = [[col[i] for col in cols] for i in nz_rows]
    kernel = linalg.nullspace(rows, len(cols_idx))
    basis = []
    for vec in kernel:
        full = [Fraction(0)] * len(idx)
        for n, c in zip(cols_idx, vec):
            full[n] = c
        basis.append(idx.field(full, backend=EXACT))
    return CentralizerResult(len(basis), basis, m, truncated, restrict_vanishing)


def span_equal(fields: Sequence[PolyVF], others: Sequence[PolyVF], m: int) -> bool:
    """True when two lists of jets span the same subspace of J^m."""
    idx = JetBasisIndex(m)
    a = [idx.coords(f.truncate(m)) for f in fields]
    b = [idx.coords(f.truncate(m)) for f in others]
    ra, rb = linalg.rank(a), linalg.rank(b)
    return ra == rb == linalg.rank(a + b)


def rotation_field(order: int = 1) -> PolyVF:
    return PolyVF(order, {(0, 1): Fraction(-1)}, {(1, 0): Fraction(1)})


def y_scaling_field(order: int = 1) -> PolyVF:
    return PolyVF(order, {}, {(0, 1): Fraction(1)})


# ------------------------------------------------------------------ normal forms

def _radial_angular(j: int) -> tuple:
    """``r^(2j) (x, y)`` and ``r^(2j) (-y, x)`` as coefficient dicts."""
    rx, ry = {}, {}
    for i in range(j + 1):
        c = math.comb(j, i)
        rx[(2 * i + 1, 2 * (j - i))] = c
        ry[(2 * i, 2 * (j - i) + 1)] = c
    radial = ({m: Fraction(c) for m, c in rx.items()}, {m: Fraction(c) for m, c in ry.items()})
    angular = ({m: Fraction(-c) for m, c in ry.items()}, {m: Fraction(c) for m, c in rx.items()})
    return radial, angular


def _lincomb(order: int, parts) -> PolyVF:
    dx, dy = {}, {}
    for coeff, (px, py) in parts:
        for mono, c in px.items():
            dx[mono] = dx.get(mono, 0) + coeff * c
        for mono, c in py.items():
            dy[mono] = dy.get(mono, 0) + coeff * c
    return PolyVF(order, dx, dy, backend=EXACT)


def ah_normal_form(order: int, omega, re_a: Sequence, im_a: Sequence) -> PolyVF:
    """``z (i omega + sum_j a_j |z|^(2j))`` as a real jet of the given order."""
    rot = ({(0, 1): Fraction(-1)}, {(1, 0): Fraction(1)})
    parts = [(Fraction(omega), rot)]
    for j, (re, im) in enumerate(zip(re_a, im_a), start=1):
        if 2 * j + 1 > order:
            raise JetError(f"a_{j} does not fit in order {order}")
        radial, angular = _radial_angular(j)
        parts += [(Fraction(re), radial), (Fraction(im), angular)]
    return _lincomb(order, parts)


def sn_normal_form_field(order: int, lam, a: Sequence, b: Sequence) -> PolyVF:
    """``(sum_{k>=2} a_k x^k) d/dx + y (lam + sum_{k>=1} b_k x^k) d/dy``; ``a`` starts at a_2."""
    dx = {(k, 0): Fraction(c) for k, c in enumerate(a, start=2)}
    dy = {(0, 1): Fraction(lam)}
    dy.update({(k, 1): Fraction(c) for k, c in enumerate(b, start=1)})
    return PolyVF(order, dx, dy, backend=EXACT)


def bt_normal_form(order: int, b11, b12, b22, higher: Sequence = ()) -> PolyVF:
    """``y d/dx + (b11 x^2 + b12 xy + b22 y^2 + sum_j (c_j x^j + d_j x^(j-1) y)) d/dy``.

    ``higher`` lists ``(c_j, d_j)`` for j = 3, 4, ...
    """
    dy = {(2, 0): Fraction(b11), (1, 1): Fraction(b12), (0, 2): Fraction(b22)}
    for j, (c, d) in enumerate(higher, start=3):
        dy[(j, 0)] = Fraction(c)
        dy[(j - 1, 1)] = Fraction(d)
    return PolyVF(order, {(0, 1): Fraction(1)}, dy, backend=EXACT)


@dataclass(frozen=True)
class StratumTangent:
    """A normal-form point of a stratum and the partial derivatives along its free parameters."""

    kind: str
    k: int | None
    order: int
    point: PolyVF
    tangents: list
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for t in self.tangents:
            if t.degree() > self.order:
                raise JetError("stratum tangent does not fit in J^m")


def ah_stratum(k: int, order: int, omega, re_a: Sequence, im_a: Sequence) -> StratumTangent:
    """Stratum AH_k at the normal-form point with the given parameters.

    Free directions: omega, Re a_j for j > k, Im a_j for all j.
    """
    n = (order - 1) // 2
    if len(re_a) != n or len(im_a) != n:
        raise JetError(f"order {order} needs {n} coefficients a_j")
    if k + 1 > n:
        raise JetError(f"AH_{k} needs order >= {2 * k + 3}")
    if any(re_a[j] != 0 for j in range(k)) or re_a[k] == 0:
        raise JetError(f"parameters are not in AH_{k}")
    point = ah_normal_form(order, omega, re_a, im_a)
    tangents = [rotation_field(order)]
    for j in range(1, n + 1):
        radial, angular = _radial_angular(j)
        if j > k:
            tangents.append(PolyVF(order, *radial))
        tangents.append(PolyVF(order, *angular))
    params = {"omega": omega, "re_a": list(re_a), "im_a": list(im_a)}
    return StratumTangent("AH", k, order, point, tangents, params)


def sn_stratum(k: int, order: int, lam, a: Sequence, b: Sequence) -> StratumTangent:
    """Stratum SN_k; ``a`` holds a_2..a_m, ``b`` holds b_1..b_{m-1}.

    Free directions: lam, a_j for j > k+1, and every b_j.
    """
    if len(a) != order - 1 or len(b) != order - 1:
        raise JetError(f"order {order} needs {order - 1} values of a and of b")
    if k + 2 > order:
        raise JetError(f"SN_{k} needs order >= {k + 2}")
    if any(a[j] != 0 for j in range(k)) or a[k] == 0 or lam == 0:
        raise JetError(f"parameters are not in SN_{k}")
    point = sn_normal_form_field(order, lam, a, b)
    one = Fraction(1)
    tangents = [PolyVF(order, {}, {(0, 1): one})]
    tangents += [PolyVF(order, {(j, 0): one}, {}) for j in range(k + 2, order + 1)]
    tangents += [PolyVF(order, {}, {(j, 1): one}) for j in range(1, order)]
    params = {"lam": lam, "a": list(a), "b": list(b)}
    return StratumTangent("SN", k, order, point, tangents, params)


BT_VARIANTS = ("BT0", "BT1_b11", "BT1_b12")


def bt_stratum(variant: str, order: int, b11, b12, b22, higher: Sequence = ()) -> StratumTangent:
    """BT stratum: ``BT0`` (b11 b12 != 0) or a BT_1 substratum ``BT1_b11`` / ``BT1_b12``."""
    if variant not in BT_VARIANTS:
        raise JetError(f"unknown BT variant {variant!r}")
    if len(higher) != max(0, order - 2):
        raise JetError(f"order {order} needs {max(0, order - 2)} higher-order pairs")
    zero11, zero12 = b11 == 0, b12 == 0
    expect = {"BT0": (False, False), "BT1_b11": (True, False), "BT1_b12": (False, True)}[variant]
    if (zero11, zero12) != expect:
        raise JetError(f"parameters are not in {variant}")
    point = bt_normal_form(order, b11, b12, b22, higher)
    one = Fraction(1)
    tangents = []
    if not zero11:
        tangents.append(PolyVF(order, {}, {(2, 0): one}))
    if not zero12:
        tangents.append(PolyVF(order, {}, {(1, 1): one}))
    tangents.append(PolyVF(order, {}, {(0, 2): one}))
    for j in range(3, order + 1):
        tangents.append(PolyVF(order, {}, {(j, 0): one}))
        tangents.append(PolyVF(order, {}, {(j - 1, 1): one}))
    kind, _, sub = variant.partition("_")
    params = {"b11": b11, "b12": b12, "b22": b22, "higher": list(higher), "substratum": sub or None}
    return StratumTangent(kind, None, order, point, tangents, params)


def _rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        value = Fraction(rng.randint(-7, 7), rng.randint(1, 7))
        if value != 0 or not nonzero:
            return value


def sample_stratum(kind: str, k: int | None, order: int, rng: random.Random) -> StratumTangent:
    """Random normal-form point (small rationals, denominators <= 7) of a stratum."""
    if kind == "AH":
        n = (order - 1) // 2
        re_a = [Fraction(0)] * k + [_rational(rng, True)] + [_rational(rng) for _ in range(n - k - 1)]
        im_a = [_rational(rng) for _ in range(n)]
        return ah_stratum(k, order, _rational(rng, True), re_a, im_a)
    if kind == "SN":
        a = [Fraction(0)] * k + [_rational(rng, True)] + [_rational(rng) for _ in range(order - k - 2)]
        b = [_rational(rng) for _ in range(order - 1)]
        return sn_stratum(k, order, _rational(rng, True), a, b)
    if kind in BT_VARIANTS:
        b11 = Fraction(0) if kind == "BT1_b11" else _rational(rng, True)
        b12 = Fraction(0) if kind == "BT1_b12" else _rational(rng, True)
        higher = [(_rational(rng), _rational(rng)) for _ in range(max(0, order - 2))]
        return bt_stratum(kind, order, b11, b12, _rational(rng), higher)
    raise JetError(f"unknown stratum kind {kind!r}")


# ------------------------------------------------------------------ orbit codimension

def _orbit_rows(v: PolyVF, m: int) -> tuple:
    idx = JetBasisIndex(m)
    van = idx.vanishing
    vm = v.truncate(m)
    rows = []
    for n in van:
        img = idx.coords(bracket(idx.basis_field(n), vm, m))
        rows.append([img[i] for i in van])
    return rows, idx, van


def orbit_rank(v: PolyVF, m: int) -> int:
    """Dimension of the D^m-orbit tangent space ``{[u, v] : u(0) = 0}`` in J^m."""
    _require_exact(v)
    rows, _, _ = _orbit_rows(v, m)
    return linalg.rank(rows)


def orbit_codim(v: PolyVF, stratum: StratumTangent, m: int | None = None) -> int:
    """Codimension of the class through ``v`` in the space of jets vanishing at 0.

    Stacks the orbit tangents ``[u, v]`` (u ranging over jets vanishing at 0)
    with the stratum's normal-form tangents and returns
    ``dim J^m_0 - rank``.
    """
    _require_exact(v)
    m = stratum.order if m is None else m
    if m != stratum.order or v.truncate(m) != stratum.point.truncate(m):
        raise JetError("v is not the normal-form point of the given stratum")
    rows, idx, van = _orbit_rows(v, m)
    for t in stratum.tangents:
        full = idx.coords(t.truncate(m))
        rows.append([full[i] for i in van])
    return len(van) - linalg.rank(rows)


def codim_table(kind: str, k: int | None, order: int, samples: int, seed: int) -> list:
    """Orbit codimension of ``samples`` random points of a stratum."""
    rng = random.Random(seed)
    out = []
    for _ in range(samples):
        st = sample_stratum(kind, k, order, rng)
        out.append({"codim": orbit_codim(st.point, st), "params": st.params})
    return out
