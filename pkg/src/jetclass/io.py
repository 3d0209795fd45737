"""JSON/CSV schemas, run configuration and deterministic report assembly."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .classify import ClassLabel, Tolerances
from .errors import BackendMismatchError, JetError
from .family import FamilySpec, ScanReport, family_from_terms
from .jets import PolyVF
from .scalar import EXACT, FLOAT, backend_of, format_scalar, parse_scalar

__all__ = [
    "RunConfig",
    "parse_field",
    "field_to_json",
    "parse_family",
    "parse_matrix",
    "to_jsonable",
    "label_to_dict",
    "emit_report",
    "scan_report_to_dict",
    "write_scan_csv",
    "CSV_COLUMNS",
    "MAX_ORDER",
]

MAX_ORDER = 12
CSV_COLUMNS = ("eps1", "eps2", "x", "y", "det", "tr", "label", "payload1", "payload2", "payload3", "flags")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run; echoed verbatim into every report."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    order: int | None = None
    tol_zero: float = 1e-9
    tol_nonzero: float = 1e-6
    seed: int = 0
    outputs: dict = field(default_factory=dict)
    backend: str = "auto"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.tol_zero > 0 and self.tol_nonzero > 0):
            raise JetError("tolerances must be positive")
        if not self.tol_zero < self.tol_nonzero:
            raise JetError("tol_zero must be smaller than tol_nonzero")
        if self.order is not None and not 1 <= self.order <= MAX_ORDER:
            raise JetError(f"order must lie in 1..{MAX_ORDER}")
        if self.backend not in ("auto", EXACT, FLOAT):
            raise JetError(f"unknown backend {self.backend!r}")

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(self.tol_zero, self.tol_nonzero)

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": dict(self.inputs),
            "order": self.order,
            "tol_zero": self.tol_zero,
            "tol_nonzero": self.tol_nonzero,
            "seed": self.seed,
            "outputs": dict(self.outputs),
            "backend": self.backend,
            **({"extra": dict(self.extra)} if self.extra else {}),
        }


def _load(text_or_obj) -> Any:
    if isinstance(text_or_obj, (str, bytes)):
        try:
            return json.loads(text_or_obj)
        except json.JSONDecodeError as exc:
            raise JetError(f"malformed JSON: {exc}") from None
    return text_or_obj


def _int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise JetError(f"{what} must be an integer, got {value!r}")
    return value


def _coeff(value):
    if isinstance(value, str):
        try:
            return parse_scalar(value)
        except ValueError as exc:
            raise JetError(str(exc)) from None
    if isinstance(value, bool):
        raise JetError(f"bad coefficient {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise JetError(f"non-finite coefficient {value!r}")
        return value
    raise JetError(f"bad coefficient {value!r}")


def _single_backend(values) -> str:
    kinds = {backend_of(v) for v in values} - {None}
    if len(kinds) > 1:
        raise BackendMismatchError("input mixes rational and decimal coefficients")
    return kinds.pop() if kinds else EXACT


def parse_field(text) -> PolyVF:
    """Parse ``{"order": m, "dx": [[i, j, "c"], ...], "dy": [...]}`` into a PolyVF.

    Rational strings (``"3"``, ``"-1/2"``) select the exact backend, decimal
    strings (``"0.5"``, ``"1e-3"``) the float backend; mixing is an error.
    """
    obj = _load(text)
    if not isinstance(obj, Mapping):
        raise JetError("field JSON must be an object")
    unknown = set(obj) - {"order", "dx", "dy"}
    if unknown:
        raise JetError(f"unknown field keys {sorted(unknown)}")
    order = _int(obj.get("order"), "order")
    if order < 1:
        raise JetError("order must be >= 1")
    comps = []
    for name in ("dx", "dy"):
        entries = obj.get(name, [])
        if not isinstance(entries, list):
            raise JetError(f"{name} must be a list of [i, j, coeff] triples")
        comp = {}
        for entry in entries:
            if not isinstance(entry, list) or len(entry) != 3:
                raise JetError(f"{name} entry {entry!r} is not [i, j, coeff]")
            i, j = _int(entry[0], "exponent"), _int(entry[1], "exponent")
            if i < 0 or j < 0:
                raise JetError(f"negative exponent in {entry!r}")
            if i + j > order:
                raise JetError(f"term x^{i} y^{j} exceeds order {order}")
            if (i, j) in comp:
                raise JetError(f"duplicate monomial ({i}, {j}) in {name}")
            comp[(i, j)] = _coeff(entry[2])
        comps.append(comp)
    backend = _single_backend(list(comps[0].values()) + list(comps[1].values()))
    if backend == EXACT:
        comps = [{m: Fraction(c) for m, c in comp.items()} for comp in comps]
    return PolyVF(order, comps[0], comps[1], backend=backend)


def field_to_json(v: PolyVF) -> dict:
    return {
        "order": v.order,
        "dx": [[i, j, format_scalar(c)] for (i, j), c in sorted(v.dx.items())],
        "dy": [[i, j, format_scalar(c)] for (i, j), c in sorted(v.dy.items())],
    }


def _box(value, n: int, what: str) -> tuple:
    if not isinstance(value, list) or len(value) != n:
        raise JetError(f"{what} must be a list of {n} [lo, hi] pairs")
    out = []
    for iv in value:
        if not isinstance(iv, list) or len(iv) != 2:
            raise JetError(f"{what} entries must be [lo, hi]")
        lo, hi = (_coeff(c) for c in iv)
        if not lo < hi:
            raise JetError(f"{what} interval {iv!r} is empty")
        out.append((lo, hi))
    return tuple(out)


def parse_family(text) -> FamilySpec:
    """Parse the family schema: ``{"k", "dx": [[[e1, e2], [i, j], "c"], ...], "dy", "eps_box", "phase_box"}``."""
    obj = _load(text)
    if not isinstance(obj, Mapping):
        raise JetError("family JSON must be an object")
    k = _int(obj.get("k"), "k")
    if k not in (1, 2):
        raise JetError("k must be 1 or 2")
    comps = []
    for name in ("dx", "dy"):
        terms = []
        for entry in obj.get(name, []):
            if not isinstance(entry, list) or len(entry) != 3:
                raise JetError(f"{name} entry {entry!r} is not [eps_exponents, [i, j], coeff]")
            e, mono, c = entry
            if not isinstance(e, list) or len(e) != k or not isinstance(mono, list) or len(mono) != 2:
                raise JetError(f"bad exponents in {entry!r}")
            e = [_int(t, "exponent") for t in e]
            mono = [_int(t, "exponent") for t in mono]
            if min(e + mono) < 0:
                raise JetError(f"negative exponent in {entry!r}")
            terms.append((e, mono, _coeff(c)))
        comps.append(terms)
    eps_box = _box(obj.get("eps_box"), k, "eps_box")
    phase_box = _box(obj.get("phase_box"), 2, "phase_box")
    return family_from_terms(k, comps[0], comps[1], eps_box, phase_box)


def parse_matrix(text) -> list:
    """Square matrix from ``[[...], ...]`` or ``{"matrix": [[...], ...]}``; one backend throughout."""
    obj = _load(text)
    if isinstance(obj, Mapping):
        obj = obj.get("matrix")
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise JetError("matrix must be a non-empty list of rows")
    n = len(obj)
    if any(len(r) != n for r in obj):
        raise JetError("matrix must be square")
    rows = [[_coeff(c) for c in r] for r in obj]
    _single_backend([c for r in rows for c in r])
    return rows


def to_jsonable(obj) -> Any:
    """Recursively convert results to JSON types; scalars keep full precision."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return format_scalar(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):
        return to_jsonable(obj.item())
    if isinstance(obj, PolyVF):
        return field_to_json(obj)
    if isinstance(obj, ClassLabel):
        return label_to_dict(obj)
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _payload_value(value):
    if isinstance(value, (list, tuple)):
        return [_payload_value(v) for v in value]
    if isinstance(value, (Fraction, float, int)) and not isinstance(value, bool):
        return format_scalar(value)
    return to_jsonable(value)


def label_to_dict(label: ClassLabel) -> dict:
    """Label with payload scalars rendered as strings (``"p/q"`` or round-trip decimals)."""
    return {
        "kind": label.kind,
        "k": label.k,
        "name": label.name,
        "payload": {k: _payload_value(v) for k, v in label.payload.items()},
        "reason": label.reason,
        "order": label.order,
    }


def emit_report(result: Mapping, config: RunConfig | None = None) -> str:
    """Deterministic JSON text: sorted keys, tool version and the run configuration."""
    from . import __version__

    doc = {"tool": "jetclass", "version": __version__}
    if config is not None:
        doc["config"] = config.to_dict()
    doc.update(to_jsonable(dict(result)))
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _record_dict(r) -> dict:
    return {
        "eps": list(r.eps),
        "x": list(r.x),
        "residual": r.residual,
        "det": r.det,
        "tr": r.tr,
        "label": label_to_dict(r.label),
        "flags": list(r.flags),
    }


def scan_report_to_dict(report: ScanReport) -> dict:
    s = report.settings
    return {
        "grid": {"n1": report.grid.n1, "n2": report.grid.n2, "eps_box": [list(iv) for iv in report.grid.eps_box]},
        "settings": {
            "seed_grid": s.seed_grid, "rho": s.rho, "tau_res": s.tau_res, "tau_loc": s.tau_loc,
            "max_depth": s.max_depth, "order": s.order,
            "tol_zero": s.tolerances.zero, "tol_nonzero": s.tolerances.nonzero,
        },
        "nodes": [
            {
                "index": list(n.index),
                "eps": list(n.eps),
                "verdict": n.verdict,
                "details": n.details,
                "counts": n.counts,
                "flags": list(n.flags),
                "records": [_record_dict(r) for r in n.records],
            }
            for n in report.nodes
        ],
        "loci": [
            {"kind": p.kind, "eps": list(p.eps), "x": list(p.x), "residual": p.residual,
             "edge": [list(e) for e in p.edge], "method": p.method}
            for p in report.loci
        ],
        "summary": report.summary,
    }


def _csv_payload(label: ClassLabel) -> list:
    p = label.payload
    if label.kind == "AH":
        vals = [p.get("omega"), *(list(p.get("re_a", [])) + [None, None])[:2]]
    elif label.kind == "SN":
        vals = [p.get("lam"), *(list(p.get("a", []))[1:] + [None, None])[:2]]
    elif label.kind in ("BT0", "BT1"):
        vals = [p.get("b11"), p.get("b12"), p.get("b22")]
    else:
        vals = [None, None, None]
    return ["" if v is None else format_scalar(v) for v in vals]


def write_scan_csv(report: ScanReport, fh) -> None:
    """One row per singular point. Payload columns: AH omega, Re a1, Re a2; SN lam, a2, a3; BT b11, b12, b22."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for node in report.nodes:
        for r in node.records:
            writer.writerow([
                repr(r.eps[0]), repr(r.eps[1]), repr(r.x[0]), repr(r.x[1]), repr(r.det), repr(r.tr),
                r.label.name, *_csv_payload(r.label), ";".join(r.flags + node.flags),
            ])
