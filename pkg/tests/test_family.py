import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetclass.classify import ClassLabel
from jetclass.errors import JetError, PreconditionError
from jetclass.family import (GridSpec, ScanSettings, SingularPointRecord, audit_main_theorem, audit_records,
                             family_from_terms, scan, singular_points_at)
from jetclass.io import emit_report, scan_report_to_dict

BOX = [(-1, 1), (-1, 1)]
PHASE = [(-2, 2), (-2, 2)]


def bt_family():
    # x' = y,  y' = e1 + e2 y + x^2 + x y
    return family_from_terms(2, [[(0, 0), (0, 1), 1]],
                             [[(1, 0), (0, 0), 1], [(0, 1), (0, 1), 1], [(0, 0), (2, 0), 1], [(0, 0), (1, 1), 1]],
                             BOX, PHASE)


def fold_family():
    # x' = e + x^2,  y' = -y
    return family_from_terms(1, [[(1,), (0, 0), 1], [(0,), (2, 0), 1]], [[(0,), (0, 1), -1]], [(-1, 1)], PHASE)


def hopf_family():
    # x' = e x - y - x r^2,  y' = x + e y - y r^2
    dx = [[(1,), (1, 0), 1], [(0,), (0, 1), -1], [(0,), (3, 0), -1], [(0,), (1, 2), -1]]
    dy = [[(0,), (1, 0), 1], [(1,), (0, 1), 1], [(0,), (0, 3), -1], [(0,), (2, 1), -1]]
    return family_from_terms(1, dx, dy, [(-1, 1)], PHASE)


@pytest.fixture(scope="module")
def bt():
    return bt_family()


# ---------------------------------------------------------------- singular points

def test_points_bt_examples(bt):
    recs = singular_points_at(bt, (-1, 0))
    assert sorted(round(r.x[0], 12) for r in recs) == [-1.0, 1.0]
    assert all(r.label.kind == "H" for r in recs)
    by_x = {round(r.x[0]): r for r in recs}
    assert by_x[1].det == pytest.approx(-2) and by_x[-1].det == pytest.approx(2) and by_x[-1].tr == pytest.approx(-1)
    assert audit_records(recs)[0] == "Case1"

    (r,) = singular_points_at(bt, (0, 0))
    assert r.x == pytest.approx((0, 0), abs=1e-12)
    assert r.label.name == "BT0"
    assert r.label.payload["b11"] == pytest.approx(1) and r.label.payload["b12"] == pytest.approx(1)
    assert audit_records([r]) == ("Case3", "BT0", audit_records([r])[2])

    assert singular_points_at(bt, (1, 0)) == []


def test_points_on_loci(bt):
    (r,) = singular_points_at(bt, (0, 0.5))
    assert r.label.name == "SN(0)" and r.deg_mfd
    recs = singular_points_at(bt, (-0.04, 0.2))
    names = sorted(p.label.name for p in recs)
    assert names == ["AH(0)", "H"]
    ah = next(p for p in recs if p.label.kind == "AH")
    assert ah.label.payload["omega"] == pytest.approx(math.sqrt(0.4))
    assert audit_records(recs)[:2] == ("Case3", "AH(0)")


@settings(max_examples=25)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_residual_and_multiplicity_invariants(e1, e2):
    bt = bt_family()
    recs = singular_points_at(bt, (e1, e2))
    # the family has at most two singular points, at x = +-sqrt(-e1)
    assert len(recs) <= 2
    for r in recs:
        assert r.residual <= 1e-12
        assert abs(r.x[1]) <= 1e-9
        assert r.x[0] ** 2 == pytest.approx(-e1, abs=1e-9)
    xs = [r.x[0] for r in recs]
    assert all(abs(a - b) > 1e-6 for i, a in enumerate(xs) for b in xs[i + 1:])


def test_one_parameter_families():
    fold = fold_family()
    assert len(singular_points_at(fold, (-0.25,))) == 2
    (r,) = singular_points_at(fold, (0,))
    assert r.label.name == "SN(0)"
    assert audit_records([r], k=1)[:2] == ("Case3", "SN(0)")
    assert singular_points_at(fold, (0.5,)) == []

    hopf = hopf_family()
    (r,) = singular_points_at(hopf, (0,))
    assert r.label.name == "AH(0)" and r.label.payload["re_a"][0] < 0
    assert singular_points_at(hopf, (0.5,))[0].label.kind == "H"


def test_boundary_points_flagged():
    F = family_from_terms(1, [[(1,), (0, 0), 1], [(0,), (2, 0), 1]], [[(0,), (0, 1), -1]], [(-5, 1)], PHASE)
    recs = singular_points_at(F, (-4,))
    assert len(recs) == 2 and all(r.boundary_uncertain for r in recs)
    assert audit_records(recs)[2]["counted"] == 0


def test_preconditions(bt):
    with pytest.raises(PreconditionError):
        singular_points_at(bt, (2, 0))
    with pytest.raises(PreconditionError):
        singular_points_at(bt, (0,))
    with pytest.raises(PreconditionError):
        scan(fold_family(), GridSpec(3, 3, BOX))
    with pytest.raises(PreconditionError):
        scan(bt, GridSpec(3, 3, [(-2, 1), (-1, 1)]))
    with pytest.raises(JetError):
        family_from_terms(3, [], [], [(0, 1)] * 3, PHASE)
    with pytest.raises(JetError):
        GridSpec(0, 3, BOX)
    with pytest.raises(JetError):
        ScanSettings(rho=0)


# ---------------------------------------------------------------- audit

def record(name, det=0.0, tr=0.0, flags=()):
    kind, k = (name.split("(")[0], int(name[-2])) if "(" in name else (name, None)
    return SingularPointRecord((0.0, 0.0), (0.0, 0.0), 0.0, det, tr, ClassLabel(kind, k), flags)


def test_audit_verdicts():
    assert audit_records([record("H", 1, 1)])[0] == "Case1"
    assert audit_records([record("SN(0)"), record("AH(0)")])[:2] == ("Case2", "AH(0), SN(0)")
    assert audit_records([record("SN(1)")])[:2] == ("Case3", "SN(1)")
    assert audit_records([record("SN(1)"), record("SN(0)")])[0] == "Violation"
    assert audit_records([record("SN(2)")])[0] == "Violation"
    assert audit_records([record("BT1")])[0] == "Violation"
    assert audit_records([record("Unresolved")])[0] == "Inconclusive"


def test_audit_three_points_is_violation():
    verdict, details, counts = audit_records([record("SN(0)")] * 3)
    assert verdict == "Violation" and "3 non-hyperbolic" in details
    assert counts["nonhyperbolic"] == 3


def test_audit_ignores_boundary_uncertain():
    recs = [record("SN(0)")] * 2 + [record("AH(0)", flags=("boundary-uncertain",))]
    verdict, _, counts = audit_records(recs)
    assert verdict == "Case2" and counts["boundary_uncertain"] == 1


# ---------------------------------------------------------------- scan

@pytest.fixture(scope="module")
def scan11(bt):
    return scan(bt, GridSpec(11, 11, BOX), ScanSettings(threads=1))


def test_scan_summary(scan11):
    s = scan11.summary
    assert s["ok"] and not s["violations"] and not s["inconclusive"]
    assert s["max_nonhyperbolic"] <= 1 and set(s["verdicts"]) <= {"Case1", "Case3"}
    assert scan11.node(5, 5).verdict == "Case3" and scan11.node(5, 5).details == "BT0"
    assert audit_main_theorem(scan11) == s


def test_scan_loci_on_analytic_curves(scan11):
    sn = [p for p in scan11.loci if p.kind == "SN"]
    ah = [p for p in scan11.loci if p.kind == "AH"]
    assert sn and ah
    assert max(abs(p.eps[0]) for p in sn) <= 1e-8
    assert max(abs(p.eps[0] + p.eps[1] ** 2) for p in ah) <= 1e-8
    assert all(p.eps[1] >= -1e-8 for p in ah)


def test_scan_deterministic_across_threads(bt):
    grid = GridSpec(7, 7, BOX)
    a = emit_report(scan_report_to_dict(scan(bt, grid, ScanSettings(threads=1))))
    b = emit_report(scan_report_to_dict(scan(bt, grid, ScanSettings(threads=3))))
    assert a == b


def test_scan_refinement_stable(bt, scan11):
    fine = scan(bt, GridSpec(21, 21, BOX), ScanSettings(threads=1))
    tau = scan11.settings.tau_loc
    for p in scan11.loci:
        near = [q for q in fine.loci if q.kind == p.kind and np.hypot(*np.subtract(q.eps, p.eps)) <= 2 * tau]
        assert near, p
    for i in range(11):
        for j in range(11):
            assert fine.node(2 * i, 2 * j).verdict == scan11.node(i, j).verdict
