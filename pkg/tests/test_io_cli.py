import csv
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exact_fields, monomials
from jetclass.cli import main
from jetclass.classify import classify_germ
from jetclass.errors import BackendMismatchError, JetError
from jetclass.io import (CSV_COLUMNS, RunConfig, emit_report, field_to_json, label_to_dict, parse_family,
                         parse_field, parse_matrix, to_jsonable)
from jetclass.jets import PolyVF

SN = {"order": 2, "dx": [[2, 0, "1"]], "dy": [[0, 1, "-1"]]}
BT_FAMILY = {"k": 2, "dx": [[[0, 0], [0, 1], "1"]],
             "dy": [[[1, 0], [0, 0], "1"], [[0, 1], [0, 1], "1"], [[0, 0], [2, 0], "1"], [[0, 0], [1, 1], "1"]],
             "eps_box": [["-1", "1"], ["-1", "1"]], "phase_box": [["-2", "2"], ["-2", "2"]]}


# ---------------------------------------------------------------- parsing

def test_parse_field_examples():
    v = parse_field(json.dumps(SN))
    assert v.backend == "exact" and v.dx == {(2, 0): 1} and v.dy == {(0, 1): -1}
    w = parse_field({"order": 1, "dx": [[1, 0, "0.5"]], "dy": [[0, 1, -2.0]]})
    assert w.backend == "float" and w.dx[(1, 0)] == 0.5
    assert parse_field({"order": 1, "dx": [[1, 0, "-1/2"]]}).dx[(1, 0)] == Fraction(-1, 2)
    assert parse_field({"order": 1, "dx": [[1, 0, 3]]}).dx[(1, 0)] == Fraction(3)


@pytest.mark.parametrize("bad", [
    "{not json",
    [],
    {"order": 2, "dx": [], "extra": 1},
    {"order": 0},
    {"order": "2"},
    {"order": 2, "dx": [[3, 0, "1"]]},
    {"order": 2, "dx": [[1, 0, "1"], [1, 0, "2"]]},
    {"order": 2, "dx": [[-1, 0, "1"]]},
    {"order": 2, "dx": [[1, 0]]},
    {"order": 2, "dx": [[1, 0, "abc"]]},
    {"order": 2, "dx": [[1, 0, True]]},
])
def test_parse_field_errors(bad):
    with pytest.raises(JetError):
        parse_field(bad if isinstance(bad, str) else json.dumps(bad))


def test_parse_field_mixed_backends():
    with pytest.raises(BackendMismatchError):
        parse_field({"order": 1, "dx": [[1, 0, "1/2"]], "dy": [[0, 1, "0.5"]]})


@given(exact_fields(4, min_degree=0))
def test_field_roundtrip_exact(v):
    assert parse_field(json.dumps(field_to_json(v))) == v


@given(st.dictionaries(st.sampled_from(monomials(3, 1)),
                       st.floats(-1e6, 1e6, allow_nan=False).filter(lambda c: c != 0), min_size=1))
def test_field_roundtrip_float(comp):
    v = PolyVF(3, comp, {}, backend="float")
    w = parse_field(json.dumps(field_to_json(v)))
    assert w == v and w.backend == "float"


def test_parse_family_and_matrix():
    F = parse_family(json.dumps(BT_FAMILY))
    assert F.k == 2 and F.at((0.5, 0))[1] == {(0, 0): 0.5, (2, 0): 1.0, (1, 1): 1.0}
    with pytest.raises(JetError):
        parse_family(json.dumps({**BT_FAMILY, "k": 3}))
    with pytest.raises(JetError):
        parse_family(json.dumps({**BT_FAMILY, "eps_box": [["1", "-1"], ["-1", "1"]]}))
    assert parse_matrix('[["0", "-1"], ["1", "0"]]') == [[0, -1], [1, 0]]
    assert parse_matrix({"matrix": [[1.5]]}) == [[1.5]]
    with pytest.raises(JetError):
        parse_matrix("[[1, 2], [3]]")
    with pytest.raises(BackendMismatchError):
        parse_matrix('[["1/2", "0.5"], ["0", "1"]]')


# ---------------------------------------------------------------- config and reports

def test_run_config_validation():
    RunConfig("classify", order=12)
    for kwargs in ({"tol_zero": 0}, {"tol_zero": 1e-3, "tol_nonzero": 1e-4}, {"order": 13},
                   {"order": 0}, {"backend": "gpu"}):
        with pytest.raises(JetError):
            RunConfig("classify", **kwargs)


def test_emit_report_deterministic_and_echoes_config():
    cfg = RunConfig("classify", inputs={"input": "a.json"}, order=3, seed=7)
    label = classify_germ(parse_field(SN))
    a = emit_report(label_to_dict(label), cfg)
    b = emit_report(label_to_dict(classify_germ(parse_field(SN))), cfg)
    assert a == b
    obj = json.loads(a)
    assert obj["config"]["seed"] == 7 and obj["config"]["order"] == 3
    assert obj["name"] == "SN(0)" and obj["tool"] == "jetclass"


def test_to_jsonable_scalars():
    assert to_jsonable({"a": Fraction(1, 3), "b": [0.1, 2]}) == {"a": "1/3", "b": [0.1, 2]}
    with pytest.raises(TypeError):
        to_jsonable(object())


# ---------------------------------------------------------------- command line

def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_cli_classify(tmp_path, capsys):
    code, out = run(["classify", "--input", write(tmp_path, "sn.json", SN)], capsys)
    assert code == 0 and out["name"] == "SN(0)"
    assert out["payload"]["a"] == ["0", "1"]


def test_cli_classify_unresolved_exit_code(tmp_path, capsys):
    v = {"order": 1, "dx": [], "dy": [[0, 1, "-1"]]}
    code, out = run(["classify", "--input", write(tmp_path, "low.json", v)], capsys)
    assert code == 2 and out["kind"] == "Unresolved"


@pytest.mark.parametrize("argv", [
    ["classify"],
    ["classify", "--input", "/nonexistent.json"],
    ["classify", "--input", "{path}", "--order", "20"],
    ["classify", "--input", "{path}", "--tol-zero", "1e-3", "--tol-nonzero", "1e-6"],
    ["bounds", "--k", "-1"],
    ["nosuch"],
])
def test_cli_input_errors(argv, tmp_path, capsys):
    path = write(tmp_path, "sn.json", SN)
    assert main([a.replace("{path}", path) for a in argv]) == 1
    capsys.readouterr()


def test_cli_bad_field_file(tmp_path, capsys):
    path = write(tmp_path, "bad.json", {"order": 2, "dx": [[3, 0, "1"]], "dy": []})
    assert main(["classify", "--input", path]) == 1
    assert "exceeds order" in capsys.readouterr().err


def test_cli_centralizer_and_multiplicity(tmp_path, capsys):
    path = write(tmp_path, "sn.json", SN)
    code, out = run(["centralizer", "--input", path], capsys)
    assert code == 0 and out["dim"] == 2
    code, out = run(["centralizer", "--input", path, "--restrict-vanishing", "--truncated"], capsys)
    assert code == 0 and out["dim"] >= 2
    code, out = run(["multiplicity", "--input", path], capsys)
    assert code == 0 and out["multiplicity"] == 2
    zero = write(tmp_path, "zero.json", {"order": 2})
    code, out = run(["multiplicity", "--input", zero, "--cutoff", "4"], capsys)
    assert out["multiplicity"] == ">= 4"


def test_cli_resultant_bounds_codim(tmp_path, capsys):
    code, out = run(["resultant", "--matrix", write(tmp_path, "m.json", [["0", "-1"], ["1", "0"]])], capsys)
    assert code == 0 and out["zero"] is True
    code, out = run(["bounds", "--k", "1"], capsys)
    assert out["strict_max_point"] == 1 and "note" in out
    code, out = run(["codim", "--class", "SN", "--k", "1", "--samples", "2"], capsys)
    assert code == 0 and [r["codim"] for r in out["tables"]["SN_1"]] == [2, 2]
    assert main(["codim", "--class", "AH"]) == 1
    capsys.readouterr()


def test_cli_scan_writes_json_and_csv(tmp_path, capsys):
    fam = write(tmp_path, "bt.json", BT_FAMILY)
    out, table = tmp_path / "scan.json", tmp_path / "scan.csv"
    code = main(["scan", "--family", fam, "--grid", "5x5", "--threads", "1", "--out", str(out), "--csv", str(table)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["summary"]["ok"] and len(report["nodes"]) == 25
    rows = list(csv.reader(table.open()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert any(r[CSV_COLUMNS.index("label")] == "BT0" for r in rows[1:])
    assert main(["scan", "--family", fam, "--grid", "five"]) == 1
    capsys.readouterr()
