"""Parameter families of planar polynomial fields: singular-point search,
germ classification, codimension-one locus localization and the audit of
the allowed configurations of non-hyperbolic points.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .classify import ClassLabel, Tolerances, classify_germ
from .errors import JetError, PreconditionError
from .jets import PolyVF
from .scalar import FLOAT

log = logging.getLogger(__name__)

__all__ = [
    "FamilySpec",
    "GridSpec",
    "ScanSettings",
    "SingularPointRecord",
    "NodeResult",
    "LocusPoint",
    "ScanReport",
    "W_CLASSES",
    "CASE2_CLASSES",
    "singular_points_at",
    "germ_at",
    "scan",
    "audit_records",
    "audit_main_theorem",
    "default_threads",
]

# labels allowed for a lone non-hyperbolic point, and for each of a pair
W_CLASSES = frozenset({"SN(0)", "AH(0)", "SN(1)", "AH(1)", "BT0"})
CASE2_CLASSES = frozenset({"SN(0)", "AH(0)"})


class _Poly:
    """Dense-evaluation polynomial in ``n`` variables: exponent matrix plus coefficients."""

    def __init__(self, terms: dict, nvars: int):
        terms = {e: float(c) for e, c in terms.items() if c != 0}
        self.nvars = nvars
        self.terms = terms
        self.E = np.array(list(terms), dtype=int).reshape(len(terms), nvars)
        self.C = np.array(list(terms.values()), dtype=float)

    def diff(self, var: int) -> "_Poly":
        out = {}
        for e, c in self.terms.items():
            if e[var]:
                f = list(e)
                f[var] -= 1
                out[tuple(f)] = out.get(tuple(f), 0.0) + c * e[var]
        return _Poly(out, self.nvars)

    def __call__(self, *xs):
        if not self.terms:
            return np.zeros(np.broadcast(*[np.asarray(x) for x in xs]).shape) if xs else 0.0
        total = 0.0
        for e, c in zip(self.E, self.C):
            t = c
            for x, p in zip(xs, e):
                if p:
                    t = t * np.asarray(x) ** p
            total = total + t
        return total


def _pmul(p: dict, q: dict) -> dict:
    out = {}
    for e, a in p.items():
        for f, b in q.items():
            g = tuple(i + j for i, j in zip(e, f))
            out[g] = out.get(g, 0.0) + a * b
    return out


def _pdiff(p: dict, var: int) -> dict:
    out = {}
    for e, c in p.items():
        if e[var]:
            f = list(e)
            f[var] -= 1
            out[tuple(f)] = out.get(tuple(f), 0.0) + c * e[var]
    return out


@dataclass(frozen=True)
class FamilySpec:
    """Polynomial family ``V(eps, x)`` with ``k`` parameters.

    ``dx``/``dy`` map ``(eps_exponents, (i, j))`` to a coefficient.
    """

    k: int
    dx: dict
    dy: dict
    eps_box: tuple
    phase_box: tuple

    def __post_init__(self):
        if self.k not in (1, 2):
            raise JetError("only k = 1 or k = 2 parameter families are supported")
        for box, n, what in ((self.eps_box, self.k, "eps_box"), (self.phase_box, 2, "phase_box")):
            if len(box) != n or any(len(iv) != 2 or not iv[0] < iv[1] for iv in box):
                raise JetError(f"{what} must be {n} nonempty intervals [lo, hi]")
        for comp in (self.dx, self.dy):
            for (e, (i, j)) in comp:
                if len(e) != self.k or min(e) < 0 or i < 0 or j < 0:
                    raise JetError(f"bad family term exponents {e}, {(i, j)}")

    def _full(self, comp: dict) -> dict:
        out = {}
        for (e, (i, j)), c in comp.items():
            key = tuple(e) + (i, j)
            out[key] = out.get(key, 0.0) + float(c)
        return out

    def full_polys(self) -> tuple:
        """Both components as dicts over ``(e_1, .., e_k, i, j)``."""
        return self._full(self.dx), self._full(self.dy)

    def at(self, eps: Sequence[float]) -> tuple:
        """Coefficient dicts ``{(i, j): c}`` of ``v_eps``."""
        out = []
        for comp in (self.dx, self.dy):
            p = {}
            for (e, mono), c in comp.items():
                val = float(c)
                for ev, p_ in zip(eps, e):
                    val *= float(ev) ** p_
                p[tuple(mono)] = p.get(tuple(mono), 0.0) + val
            out.append({m: c for m, c in p.items() if c != 0})
        return tuple(out)

    def contains_eps(self, eps: Sequence[float]) -> bool:
        return all(float(lo) <= e <= float(hi) for e, (lo, hi) in zip(eps, self.eps_box))


@dataclass(frozen=True)
class GridSpec:
    n1: int
    n2: int
    eps_box: tuple

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise JetError("grid sizes must be positive")

    def axes(self) -> tuple:
        (a0, a1), (b0, b1) = self.eps_box
        return (np.linspace(float(a0), float(a1), self.n1), np.linspace(float(b0), float(b1), self.n2))

    def nodes(self):
        e1, e2 = self.axes()
        for i in range(self.n1):
            for j in range(self.n2):
                yield (i, j), (float(e1[i]), float(e2[j]))


@dataclass(frozen=True)
class ScanSettings:
    seed_grid: int = 32
    rho: float = 1e-6
    tau_res: float = 1e-12
    tau_loc: float = 1e-8
    max_depth: int = 3
    max_iter: int = 100
    order: int = 5
    tolerances: Tolerances = field(default_factory=Tolerances)
    threads: int | None = None

    def __post_init__(self):
        if self.seed_grid < 1 or self.max_depth < 0 or self.order < 1:
            raise JetError("invalid scan settings")
        if min(self.rho, self.tau_res, self.tau_loc) <= 0:
            raise JetError("scan tolerances must be positive")


@dataclass(frozen=True)
class SingularPointRecord:
    eps: tuple
    x: tuple
    residual: float
    det: float
    tr: float
    label: ClassLabel
    flags: tuple = ()

    @property
    def boundary_uncertain(self) -> bool:
        return "boundary-uncertain" in self.flags

    @property
    def nonhyperbolic(self) -> bool:
        return self.label.kind != "H"

    @property
    def deg_mfd(self) -> bool:
        """Verbatim ``det * tr == 0`` within the classification dead zone."""
        s = max(1.0, abs(self.det), abs(self.tr))
        return abs(self.det * self.tr) < 1e-9 * s * s


@dataclass(frozen=True)
class NodeResult:
    index: tuple
    eps: tuple
    records: tuple
    verdict: str
    details: str
    counts: dict
    flags: tuple = ()


@dataclass(frozen=True)
class LocusPoint:
    kind: str  # "SN", "AH" or "neutral-saddle"
    eps: tuple
    x: tuple
    residual: float
    edge: tuple
    method: str


@dataclass
class ScanReport:
    grid: GridSpec
    settings: ScanSettings
    nodes: list
    loci: list
    summary: dict = field(default_factory=dict)

    def records(self):
        for node in self.nodes:
            yield from node.records

    def node(self, i: int, j: int) -> NodeResult:
        return self.nodes[i * self.grid.n2 + j]


# ------------------------------------------------------------------ root finding

def _shifted(poly: dict, cx: np.ndarray, cy: np.ndarray) -> dict:
    """Taylor coefficients ``D_ab(c)`` of ``p(c + (u, v))`` for arrays of centers."""
    out = {}
    for (i, j), c in poly.items():
        for a in range(i + 1):
            for b in range(j + 1):
                term = c * math.comb(i, a) * math.comb(j, b) * cx ** (i - a) * cy ** (j - b)
                out[(a, b)] = out.get((a, b), 0.0) + term
    return out


def _excluded(polys: tuple, cx, cy, rx: float, ry: float) -> np.ndarray:
    """Cells where some component provably has no zero (centered-form bound)."""
    mask = np.zeros(np.shape(cx), dtype=bool)
    for poly in polys:
        if not poly:
            continue
        D = _shifted(poly, cx, cy)
        val = np.abs(D.pop((0, 0), np.zeros(np.shape(cx))))
        bound = np.zeros(np.shape(cx))
        for (a, b), d in D.items():
            bound = bound + np.abs(d) * rx ** a * ry ** b
        mask |= val > bound
    return mask


def _newton(polys: tuple, derivs: tuple, x: np.ndarray, y: np.ndarray, settings: ScanSettings):
    P, Q = polys
    (Px, Py), (Qx, Qy) = derivs
    x, y = x.astype(float).copy(), y.astype(float).copy()
    active = np.ones(x.shape, dtype=bool)
    done = np.zeros(x.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(settings.max_iter):
            if not active.any():
                break
            xa, ya = x[active], y[active]
            f, g = P(xa, ya), Q(xa, ya)
            a, b, c, d = Px(xa, ya), Py(xa, ya), Qx(xa, ya), Qy(xa, ya)
            det = a * d - b * c
            dx = (d * f - b * g) / det
            dy = (a * g - c * f) / det
            zero_res = (f == 0) & (g == 0)
            dx = np.where(zero_res, 0.0, dx)
            dy = np.where(zero_res, 0.0, dy)
            bad = ~np.isfinite(dx) | ~np.isfinite(dy)
            xn, yn = xa - dx, ya - dy
            step = np.maximum(np.abs(dx), np.abs(dy))
            small = step <= 1e-15 * (1.0 + np.maximum(np.abs(xn), np.abs(yn)))
            idx = np.flatnonzero(active)
            x[idx] = np.where(bad, xa, xn)
            y[idx] = np.where(bad, ya, yn)
            stop = bad | small | zero_res | (np.abs(xn) > 1e8) | (np.abs(yn) > 1e8)
            done[idx[small | zero_res]] = True
            active[idx[stop]] = False
        res = np.maximum(np.abs(P(x, y)), np.abs(Q(x, y)))
    converged = np.isfinite(res) & (res <= settings.tau_res)
    return x, y, res, converged, done


def _field_polys(v: tuple) -> tuple:
    polys = tuple(_Poly(dict(p), 2) for p in v)
    derivs = tuple((p.diff(0), p.diff(1)) for p in polys)
    return polys, derivs


def _find_roots(v: tuple, phase_box, settings: ScanSettings) -> tuple:
    """All numerically converged zeros of ``v`` seeded from a subdivided grid."""
    (x0, x1), (y0, y1) = [(float(a), float(b)) for a, b in phase_box]
    polys, derivs = _field_polys(v)
    n = settings.seed_grid
    hx, hy = (x1 - x0) / n, (y1 - y0) / n
    cx, cy = np.meshgrid(x0 + hx * (np.arange(n) + 0.5), y0 + hy * (np.arange(n) + 0.5), indexing="ij")
    cx, cy = cx.ravel(), cy.ravel()
    roots, flagged = [], []
    for depth in range(settings.max_depth + 1):
        rx, ry = hx / 2, hy / 2
        keep = ~_excluded(v, cx, cy, rx, ry)
        cx, cy = cx[keep], cy[keep]
        if cx.size == 0:
            break
        x, y, res, conv, _ = _newton(polys, derivs, cx, cy, settings)
        for k in np.flatnonzero(conv):
            roots.append((float(x[k]), float(y[k]), float(res[k])))
        fail = ~conv
        if not fail.any():
            break
        fx, fy = cx[fail], cy[fail]
        if depth == settings.max_depth:
            flagged.extend(zip(fx.tolist(), fy.tolist()))
            break
        hx, hy = hx / 2, hy / 2
        offs = [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)]
        cx = np.concatenate([fx + ox * hx for ox, _ in offs])
        cy = np.concatenate([fy + oy * hy for _, oy in offs])
    return roots, flagged


def _dedup(roots: list, rho: float) -> list:
    out = []
    for r in sorted(roots, key=lambda t: (t[2], t[0], t[1])):
        if all(max(abs(r[0] - s[0]), abs(r[1] - s[1])) > rho for s in out):
            out.append(r)
    return sorted(out, key=lambda t: (t[0], t[1]))


def germ_at(v: tuple, point: Sequence[float], order: int) -> PolyVF:
    """Float Taylor jet of ``v`` at ``point`` with the constant term dropped."""
    px, py = float(point[0]), float(point[1])
    comps = []
    for poly in v:
        D = _shifted(poly, np.float64(px), np.float64(py)) if poly else {}
        comps.append({m: float(c) for m, c in D.items() if m != (0, 0) and sum(m) <= order and c != 0})
    return PolyVF(order, comps[0], comps[1], backend=FLOAT)


def _make_record(v, eps, x, y, res, phase_box, settings) -> SingularPointRecord:
    germ = germ_at(v, (x, y), settings.order)
    (a, b), (c, d) = germ.linear_part()
    flags = []
    (x0, x1), (y0, y1) = [(float(p), float(q)) for p, q in phase_box]
    if min(x - x0, x1 - x, y - y0, y1 - y) < settings.rho:
        flags.append("boundary-uncertain")
    try:
        label = classify_germ(germ, settings.tolerances)
    except (JetError, ZeroDivisionError, ArithmeticError) as exc:
        label = ClassLabel("Unresolved", None, {}, f"classification failed: {exc}", settings.order)
    return SingularPointRecord(tuple(eps), (x, y), res, a * d - b * c, a + d, label, tuple(flags))


def singular_points_at(F: FamilySpec, eps: Sequence[float], settings: ScanSettings | None = None) -> list:
    """Singular points of ``v_eps`` in the phase box, each classified.

    Parameters
    ----------
    F : FamilySpec
    eps : parameter point inside ``F.eps_box``.
    settings : ScanSettings, optional

    Returns
    -------
    list of SingularPointRecord
        Ordered by phase position. Seeds whose Newton iteration failed even
        after ``max_depth`` subdivisions are reported through a sentinel
        flag ``"unconverged-cells=N"`` on every record of the node (see
        :func:`scan` for node-level flags).
    """
    settings = settings or ScanSettings()
    eps = tuple(float(e) for e in eps)
    if len(eps) != F.k or not F.contains_eps(eps):
        raise PreconditionError(f"parameter point {eps} outside the family's parameter box")
    records, _ = _node_records(F, eps, settings)
    return records


def _node_records(F: FamilySpec, eps, settings):
    v = F.at(eps)
    roots, flagged = _find_roots(v, F.phase_box, settings)
    (x0, x1), (y0, y1) = [(float(p), float(q)) for p, q in F.phase_box]
    r = settings.rho
    inside = [t for t in roots if x0 - r <= t[0] <= x1 + r and y0 - r <= t[1] <= y1 + r]
    pts = _dedup(inside, settings.rho)
    records = [_make_record(v, eps, x, y, res, F.phase_box, settings) for x, y, res in pts]
    flags = (f"unconverged-cells={len(flagged)}",) if flagged else ()
    return records, flags


# ------------------------------------------------------------------ audit

def audit_records(records: Sequence[SingularPointRecord], k: int = 2) -> tuple:
    """Verdict for one parameter value: ``(verdict, details, counts)``.

    Verdicts are ``Case1`` (all hyperbolic), ``Case2`` (two non-hyperbolic
    points, each SN(0) or AH(0)), ``Case3`` (one non-hyperbolic point in
    W = SN(0), AH(0), SN(1), AH(1), BT0), ``Violation`` or ``Inconclusive``
    (an undecided label prevents a verdict). Boundary-uncertain points are
    left out of the counts.
    """
    counted = [r for r in records if not r.boundary_uncertain]
    nh = [r for r in counted if r.nonhyperbolic]
    unresolved = [r for r in nh if r.label.kind == "Unresolved"]
    decided = [r for r in nh if r.label.kind != "Unresolved"]
    counts = {
        "points": len(records),
        "counted": len(counted),
        "nonhyperbolic": len(nh),
        "deg_mfd": sum(r.deg_mfd for r in counted),
        "unresolved": len(unresolved),
        "boundary_uncertain": len(records) - len(counted),
    }
    names = sorted(r.label.name for r in decided)
    if len(decided) > k:
        return "Violation", f"{len(decided)} non-hyperbolic points: {names}", counts
    if unresolved:
        return "Inconclusive", f"unresolved labels: {[r.label.reason for r in unresolved]}", counts
    if not nh:
        return "Case1", "", counts
    if len(nh) == 1 and names[0] in W_CLASSES:
        return "Case3", names[0], counts
    if len(nh) == 2 and all(n in CASE2_CLASSES for n in names):
        return "Case2", ", ".join(names), counts
    return "Violation", f"non-hyperbolic labels not allowed: {names}", counts


def audit_main_theorem(report: ScanReport) -> dict:
    """Summary of the per-node verdicts: tallies, Violation coordinates, and the bound tension."""
    tally: dict = {}
    violations, inconclusive = [], []
    for node in report.nodes:
        tally[node.verdict] = tally.get(node.verdict, 0) + 1
        if node.verdict == "Violation":
            violations.append({"eps": list(node.eps), "details": node.details})
        elif node.verdict == "Inconclusive":
            inconclusive.append({"eps": list(node.eps), "details": node.details})
    loci = {}
    for p in report.loci:
        loci[p.kind] = loci.get(p.kind, 0) + 1
    flagged = sum(1 for node in report.nodes if node.flags)
    return {
        "verdicts": dict(sorted(tally.items())),
        "violations": violations,
        "inconclusive": inconclusive,
        "ok": not violations,
        "max_nonhyperbolic": max((n.counts["nonhyperbolic"] for n in report.nodes), default=0),
        "max_deg_mfd": max((n.counts["deg_mfd"] for n in report.nodes), default=0),
        "loci": dict(sorted(loci.items())),
        "flagged_nodes": flagged,
    }


# ------------------------------------------------------------------ loci

class _Augmented:
    """``v(x, eps(s)) = 0`` plus ``det = 0`` (SN) or ``tr = 0`` (AH) along a parameter segment."""

    def __init__(self, F: FamilySpec):
        px, py = F.full_polys()
        k = F.k
        ix, iy = k, k + 1
        dxx, dxy = _pdiff(px, ix), _pdiff(px, iy)
        dyx, dyy = _pdiff(py, ix), _pdiff(py, iy)
        tr = dict(dxx)
        for e, c in dyy.items():
            tr[e] = tr.get(e, 0.0) + c
        det = _pmul(dxx, dyy)
        for e, c in _pmul(dxy, dyx).items():
            det[e] = det.get(e, 0.0) - c
        self.k = k
        self.funcs = {name: _Poly(p, k + 2) for name, p in
                      (("px", px), ("py", py), ("tr", tr), ("det", det))}
        self.grads = {name: [f.diff(i) for i in range(k + 2)] for name, f in self.funcs.items()}

    def solve(self, kind: str, e0, e1, x, y, s, iters: int = 60):
        extra = "det" if kind == "SN" else "tr"
        names = ("px", "py", extra)
        e0, d = np.asarray(e0, float), np.asarray(e1, float) - np.asarray(e0, float)
        z = np.array([x, y, s], dtype=float)
        for _ in range(iters):
            eps = e0 + z[2] * d
            args = list(eps) + [z[0], z[1]]
            F = np.array([float(self.funcs[n](*args)) for n in names])
            J = np.empty((3, 3))
            for r, n in enumerate(names):
                g = [float(gi(*args)) for gi in self.grads[n]]
                J[r, 0], J[r, 1] = g[self.k], g[self.k + 1]
                J[r, 2] = float(np.dot(g[: self.k], d))
            try:
                step = np.linalg.solve(J, F)
            except np.linalg.LinAlgError:
                return None
            if not np.all(np.isfinite(step)):
                return None
            z = z - step
            if np.max(np.abs(step)) < 1e-15 * (1 + np.max(np.abs(z))):
                break
        eps = e0 + z[2] * d
        args = list(eps) + [z[0], z[1]]
        res = max(abs(float(self.funcs[n](*args))) for n in names)
        det = float(self.funcs["det"](*args))
        return z, tuple(float(e) for e in eps), res, det

    def value(self, name, eps, x, y):
        return float(self.funcs[name](*(list(eps) + [x, y])))


def _match(ra: Sequence, rb: Sequence) -> tuple:
    """Greedy nearest-neighbour matching of two point lists; returns pairs and leftovers."""
    cand = sorted(
        (math.hypot(a.x[0] - b.x[0], a.x[1] - b.x[1]), i, j)
        for i, a in enumerate(ra) for j, b in enumerate(rb)
    )
    used_a, used_b, pairs = set(), set(), []
    for _, i, j in cand:
        if i not in used_a and j not in used_b:
            used_a.add(i)
            used_b.add(j)
            pairs.append((i, j))
    left_a = [i for i in range(len(ra)) if i not in used_a]
    left_b = [j for j in range(len(rb)) if j not in used_b]
    return pairs, left_a, left_b


def _bisect(aug: _Augmented, kind: str, F: FamilySpec, ea, eb, settings: ScanSettings):
    """Fallback: bisect the sign change of det (SN) or tr (AH) of the point nearest the seed."""
    name = "det" if kind == "SN" else "tr"
    lo, hi = 0.0, 1.0
    ea, eb = np.asarray(ea, float), np.asarray(eb, float)

    def probe(s, seed):
        eps = tuple(ea + s * (eb - ea))
        recs, _ = _node_records(F, eps, settings)
        if not recs:
            return None
        r = min(recs, key=lambda r: math.hypot(r.x[0] - seed[0], r.x[1] - seed[1]))
        return aug.value(name, eps, *r.x), r

    first = probe(lo, (0.0, 0.0))
    if first is None:
        return None
    flo, rec = first
    seed = rec.x
    last = probe(hi, seed)
    if last is not None and (last[0] > 0) == (flo > 0):
        return None
    while (hi - lo) * float(np.max(np.abs(eb - ea))) > settings.tau_loc:
        mid = 0.5 * (lo + hi)
        got = probe(mid, seed)
        if got is None:
            hi = mid
            continue
        fm, rec = got
        seed = rec.x
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return tuple(float(e) for e in ea + lo * (eb - ea)), seed


def _edge_loci(aug, F, settings, a: NodeResult, b: NodeResult) -> list:
    out = []
    ra = [r for r in a.records if not r.boundary_uncertain]
    rb = [r for r in b.records if not r.boundary_uncertain]
    pairs, left_a, left_b = _match(ra, rb)
    seeds = []
    for i in left_a:
        seeds.append(("SN", ra[i].x, 0.25))
    for j in left_b:
        seeds.append(("SN", rb[j].x, 0.75))
    for i, j in pairs:
        p, q = ra[i], rb[j]
        mid = (0.5 * (p.x[0] + q.x[0]), 0.5 * (p.x[1] + q.x[1]))
        if p.det * q.det < 0:
            seeds.append(("SN", mid, 0.5))
        if p.tr * q.tr < 0 and (p.det > 0 or q.det > 0):
            seeds.append(("AH", mid, 0.5))
    for kind, x, s in seeds:
        sol = aug.solve(kind, a.eps, b.eps, x[0], x[1], s)
        method = "augmented-newton"
        ok = sol is not None and sol[2] <= max(settings.tau_res, 1e-10) and -1e-9 <= sol[0][2] <= 1 + 1e-9
        if ok:
            z, eps, res, det = sol
            point = (float(z[0]), float(z[1]))
        else:
            got = _bisect(aug, kind, F, a.eps, b.eps, settings)
            if got is None:
                log.debug("locus localization failed on edge %s-%s", a.index, b.index)
                continue
            eps, point = got
            res = max(abs(aug.value("px", eps, *point)), abs(aug.value("py", eps, *point)))
            det = aug.value("det", eps, *point)
            method = "bisection"
        label = kind
        if kind == "AH" and det <= 0:
            label = "neutral-saddle"
        out.append(LocusPoint(label, eps, point, float(res), (a.index, b.index), method))
    return out


def _dedup_loci(points: list, radius: float) -> list:
    out = []
    for p in sorted(points, key=lambda p: (p.kind, p.eps, p.x)):
        if not any(q.kind == p.kind and max(abs(p.eps[0] - q.eps[0]), abs(p.eps[1] - q.eps[1]),
                                            abs(p.x[0] - q.x[0]), abs(p.x[1] - q.x[1])) <= radius
                   for q in out):
            out.append(p)
    return out


def default_threads() -> int:
    env = os.environ.get("JETCLASS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise JetError(f"JETCLASS_THREADS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def scan(F: FamilySpec, grid: GridSpec, settings: ScanSettings | None = None) -> ScanReport:
    """Scan a two-parameter family over a parameter grid.

    Parameters
    ----------
    F : FamilySpec
        Family with ``k = 2``.
    grid : GridSpec
        ``n1 x n2`` nodes spanning ``grid.eps_box`` (inside ``F.eps_box``).
    settings : ScanSettings, optional
        Newton, dedup, localization and classification tolerances; ``threads``
        defaults to ``JETCLASS_THREADS`` or the CPU count (capped at 8).

    Returns
    -------
    ScanReport
        Nodes in grid order (row-major in ``eps1``), each with its classified
        singular points and audit verdict; localized SN and AH locus points
        found along grid edges; and the audit summary. The output does not
        depend on the thread count.
    """
    if F.k != 2:
        raise PreconditionError("scan needs a two-parameter family")
    settings = settings or ScanSettings()
    for (lo, hi), (flo, fhi) in zip(grid.eps_box, F.eps_box):
        if float(lo) < float(flo) or float(hi) > float(fhi):
            raise PreconditionError("grid box exceeds the family's parameter box")
    threads = settings.threads or default_threads()
    node_list = list(grid.nodes())

    def work(item):
        index, eps = item
        recs, flags = _node_records(F, eps, settings)
        verdict, details, counts = audit_records(recs, F.k)
        return NodeResult(index, eps, tuple(recs), verdict, details, counts, flags)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            nodes = list(pool.map(work, node_list, chunksize=16))
    else:
        nodes = [work(item) for item in node_list]

    aug = _Augmented(F)
    edges = []
    n1, n2 = grid.n1, grid.n2
    for i in range(n1):
        for j in range(n2):
            if i + 1 < n1:
                edges.append((i * n2 + j, (i + 1) * n2 + j))
            if j + 1 < n2:
                edges.append((i * n2 + j, i * n2 + j + 1))

    def edge_work(e):
        return _edge_loci(aug, F, settings, nodes[e[0]], nodes[e[1]])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            found = list(pool.map(edge_work, edges, chunksize=64))
    else:
        found = [edge_work(e) for e in edges]
    on_node = [
        LocusPoint(r.label.kind, r.eps, r.x, r.residual, (node.index, node.index), "grid-node")
        for node in nodes for r in node.records
        if r.label.kind in ("SN", "AH") and not r.boundary_uncertain
    ]
    loci = _dedup_loci(on_node + [p for chunk in found for p in chunk], 10 * settings.tau_loc)
    report = ScanReport(grid, settings, nodes, loci)
    report.summary = audit_main_theorem(report)
    return report


def family_from_terms(k: int, dx: Sequence, dy: Sequence, eps_box, phase_box) -> FamilySpec:
    """Build a :class:`FamilySpec` from ``[eps_exponents, (i, j), coeff]`` triples."""
    comps = []
    for terms in (dx, dy):
        out = {}
        for e, mono, c in terms:
            key = (tuple(int(t) for t in e), tuple(int(t) for t in mono))
            out[key] = out.get(key, 0) + (Fraction(c) if isinstance(c, (int, Fraction)) else c)
        comps.append(out)
    return FamilySpec(k, comps[0], comps[1], tuple(map(tuple, eps_box)), tuple(map(tuple, phase_box)))


__all__.append("family_from_terms")
