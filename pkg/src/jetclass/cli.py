"""``jetclass`` command line: one binary, one subcommand per computation.

Exit codes: 0 success, 1 input error, 2 result dominated by Unresolved labels.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import centralizer as cz
from . import degeneracy as dg
from .classify import classify_germ
from .errors import JetError
from .family import GridSpec, ScanSettings, default_threads, scan
from .io import (RunConfig, emit_report, field_to_json, label_to_dict, parse_family, parse_field,
                 parse_matrix, scan_report_to_dict, write_scan_csv)
from .jets import PolyVF
from .scalar import EXACT, FLOAT, format_scalar

log = logging.getLogger("jetclass")

EXIT_OK, EXIT_INPUT, EXIT_UNRESOLVED = 0, 1, 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_field(path: str, order: int | None, backend: str) -> PolyVF:
    v = parse_field(_read(path))
    if backend == FLOAT:
        v = v.to_float()
    elif backend == EXACT:
        v = v.to_exact()
    if order is not None:
        if order >= v.order:
            v = PolyVF(order, v.dx, v.dy, backend=v.backend)
        else:
            v = v.truncate(order)
    return v


def _config(args, **inputs) -> RunConfig:
    return RunConfig(
        subcommand=args.command,
        inputs={k: v for k, v in inputs.items() if v is not None},
        order=getattr(args, "order", None),
        tol_zero=args.tol_zero,
        tol_nonzero=args.tol_nonzero,
        seed=args.seed,
        outputs={k: getattr(args, k) for k in ("report", "out", "csv") if getattr(args, k, None)},
        backend=getattr(args, "backend", "auto"),
    )


# ------------------------------------------------------------------ subcommands

def cmd_classify(args) -> int:
    cfg = _config(args, input=args.input)
    v = _load_field(args.input, args.order, cfg.backend)
    if v.constant() != (0, 0) and v.backend == EXACT:
        raise JetError("the origin is not a singular point of the input field")
    label = classify_germ(v, cfg.tolerances)
    result = {**label_to_dict(label), "backend": v.backend,
              "tolerances": {"zero": cfg.tol_zero, "nonzero": cfg.tol_nonzero}}
    _write(emit_report(result, cfg), args.report)
    return EXIT_UNRESOLVED if label.kind == "Unresolved" else EXIT_OK


def cmd_centralizer(args) -> int:
    cfg = _config(args, input=args.input)
    v = _load_field(args.input, args.order, cfg.backend)
    m = args.order or v.order
    res = cz.centralizer_dim(v, m, restrict_vanishing=args.restrict_vanishing, truncated=args.truncated)
    result = {
        "dim": res.dim,
        "basis": [field_to_json(b) for b in res.basis],
        "order": m,
        "restrict_vanishing": res.restrict_vanishing,
        "truncated": res.truncated,
    }
    _write(emit_report(result, cfg), args.report)
    return EXIT_OK


def cmd_codim(args) -> int:
    cfg = _config(args)
    if args.cls in ("AH", "SN"):
        if args.k is None:
            raise JetError(f"--k is required for class {args.cls}")
        kinds = [(args.cls, args.k)]
        default_order = 2 * args.k + 3 if args.cls == "AH" else max(2, args.k + 2)
    elif args.cls == "BT0":
        kinds, default_order = [("BT0", None)], 2
    else:
        kinds, default_order = [("BT1_b11", None), ("BT1_b12", None)], 2
    order = args.order or default_order
    tables = {}
    for kind, k in kinds:
        rows = cz.codim_table(kind, k, order, args.samples, args.seed)
        tables[kind if k is None else f"{kind}_{k}"] = rows
    result = {"class": args.cls, "k": args.k, "order": order, "samples": args.samples, "tables": tables}
    _write(emit_report(result, cfg), args.report)
    return EXIT_OK


def _grid(text: str, eps_box) -> GridSpec:
    try:
        n1, n2 = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise JetError(f"--grid must look like NxM, got {text!r}") from None
    return GridSpec(n1, n2, eps_box)


def cmd_scan(args) -> int:
    cfg = _config(args, family=args.family)
    F = parse_family(_read(args.family))
    grid = _grid(args.grid, F.eps_box)
    threads = args.threads or default_threads()
    settings = ScanSettings(order=args.order or 5, tolerances=cfg.tolerances, threads=threads)
    report = scan(F, grid, settings)
    _write(emit_report(scan_report_to_dict(report), cfg), args.out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            write_scan_csv(report, fh)
    labels = [r.label.kind for r in report.records() if r.label.kind != "H"]
    unresolved = labels.count("Unresolved")
    return EXIT_UNRESOLVED if labels and 2 * unresolved > len(labels) else EXIT_OK


def cmd_resultant(args) -> int:
    cfg = _config(args, matrix=args.matrix)
    A = parse_matrix(_read(args.matrix))
    if len(A) < 2:
        raise JetError("resultant needs a matrix of size at least 2")
    R = dg.imag_resultant(A)
    result = {"resultant": format_scalar(R), "zero": R == 0,
              "charpoly": [format_scalar(c) for c in dg.charpoly(A)]}
    _write(emit_report(result, cfg), args.report)
    return EXIT_OK


def cmd_multiplicity(args) -> int:
    cfg = _config(args, input=args.input)
    v = _load_field(args.input, None, cfg.backend)
    res = dg.multiplicity(v, args.cutoff)
    result = {"multiplicity": res.multiplicity if res.stabilized else f">= {res.cutoff}",
              "stabilized": res.stabilized, "dims": list(res.dims), "cutoff": res.cutoff}
    _write(emit_report(result, cfg), args.report)
    return EXIT_OK


def cmd_bounds(args) -> int:
    cfg = _config(args)
    k = args.k
    if k < 0:
        raise JetError("k must be non-negative")
    result = {
        "k": k,
        "point_bound": dg.gk_point_bound(k),
        "sum_bound": dg.gk_sum_bound(k),
        "floor_point": dg.gk_floor_point(k),
        "floor_sum": dg.gk_floor_sum(k),
        "strict_max_point": dg.gk_strict_max_point(k),
    }
    if result["strict_max_point"] != result["floor_point"]:
        result["note"] = ("the point bound is an integer; under a strict inequality the largest "
                          "admissible multiplicity is strict_max_point")
    _write(emit_report(result, cfg), args.report)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-zero", type=float, default=1e-9, help="dead-zone lower threshold")
    common.add_argument("--tol-nonzero", type=float, default=1e-6, help="dead-zone upper threshold")
    common.add_argument("--seed", type=int, default=0, help="seed for all random sampling")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="jetclass", description="Singular points of planar vector fields: "
                                "jet classification, centralizers, codimensions and family scans.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="label a germ at the origin")
    c.add_argument("--input", required=True)
    c.add_argument("--order", type=int)
    c.add_argument("--backend", choices=["auto", EXACT, FLOAT], default="auto")
    c.add_argument("--report")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("centralizer", parents=[common], help="centralizer dimension and basis")
    c.add_argument("--input", required=True)
    c.add_argument("--order", type=int)
    c.add_argument("--restrict-vanishing", action="store_true")
    c.add_argument("--truncated", action="store_true",
                   help="only require the bracket to vanish through the jet order")
    c.add_argument("--report")
    c.set_defaults(func=cmd_centralizer)

    c = sub.add_parser("codim", parents=[common], help="orbit codimension of random stratum points")
    c.add_argument("--class", dest="cls", choices=["AH", "SN", "BT0", "BT1"], required=True)
    c.add_argument("--k", type=int)
    c.add_argument("--order", type=int)
    c.add_argument("--samples", type=int, default=5)
    c.add_argument("--report")
    c.set_defaults(func=cmd_codim)

    c = sub.add_parser("scan", parents=[common], help="scan a two-parameter family")
    c.add_argument("--family", required=True)
    c.add_argument("--grid", default="101x101")
    c.add_argument("--order", type=int, help="jet order used to classify each point (default 5)")
    c.add_argument("--threads", type=int, help="worker threads (default JETCLASS_THREADS or CPU count)")
    c.add_argument("--out")
    c.add_argument("--csv")
    c.set_defaults(func=cmd_scan)

    c = sub.add_parser("resultant", parents=[common], help="imaginary-eigenvalue resultant of a matrix")
    c.add_argument("--matrix", required=True)
    c.add_argument("--report")
    c.set_defaults(func=cmd_resultant)

    c = sub.add_parser("multiplicity", parents=[common], help="local multiplicity of v = 0 at the origin")
    c.add_argument("--input", required=True)
    c.add_argument("--cutoff", type=int, default=12)
    c.add_argument("--report")
    c.set_defaults(func=cmd_multiplicity)

    c = sub.add_parser("bounds", parents=[common], help="multiplicity bounds for k-parameter families")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--report")
    c.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (JetError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"jetclass {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
