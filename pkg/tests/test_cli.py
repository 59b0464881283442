import io
import json

import pytest

from graphfield import cli
from graphfield.graphs import GraphOracle


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), stdout=out)
    report = json.loads(out.getvalue())
    assert report["exit_code"] == code
    return code, report


@pytest.fixture
def files(tmp_path):
    k3 = tmp_path / "k3.txt"
    k3.write_text("vertices 3\nedge 1 0\nedge 2 0\nedge 2 1\n")
    p3 = tmp_path / "p3.txt"
    p3.write_text("vertices 3\nedge 1 0\nedge 2 1\n")
    flip = tmp_path / "flip.json"
    flip.write_text("[2, 1, 0]")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 0, 2]")
    return {"k3": str(k3), "p3": str(p3), "flip": str(flip), "bad": str(bad), "dir": tmp_path}


def test_verify_curves():
    code, report = run("verify-curves")
    assert code == 0 and report["result"]["passed"] == report["result"]["total"]


def test_order_example():
    code, report = run("order", "--expr", "u0*u1", "--expr", "u0+u1")
    assert code == 0 and report["result"]["answer"] == "Greater"
    assert len(report["witnesses"]["enclosures"]) == 2


def test_order_equal_is_symbolic():
    code, report = run("order", "--expr", "(u0+1)^2", "--expr", "u0^2 + 2*u0 + 1")
    assert report["result"]["answer"] == "Equal" and report["witnesses"]["symbolic"]


@pytest.mark.parametrize("expr, kind", [("u0 +", "ExprSyntaxError"), ("x1_1", "SymbolError"),
                                        ("1/(u0-u0)", "DivisionByZero")])
def test_expression_errors_are_input_errors(expr, kind):
    code, report = run("order", "--expr", expr, "--expr", "u0")
    assert code == 3 and report["outcome"] == "input-error" and report["error"].startswith(kind)


def test_syntax_error_offset_is_reported():
    _, report = run("order", "--expr", "u0 +", "--expr", "u0")
    assert report["error_offset"] == 4


def test_roundtrip(files):
    code, report = run("roundtrip", "--graph", files["k3"], "--vertices", "3")
    assert code == 0 and report["result"]["decoded"] == [[1, 0], [2, 0], [2, 1]]


def test_roundtrip_scrambled_and_sequential(files):
    code, report = run("roundtrip", "--graph", files["p3"], "--swaps", "6", "--seed", "3")
    assert code == 0 and sorted(report["witnesses"]["original_vertex"]) == [0, 1, 2]
    code, _ = run("roundtrip", "--graph", files["p3"], "--mode", "sequential")
    assert code == 0


def test_check_failure_exit_code(files, monkeypatch):
    monkeypatch.setattr(cli, "G_obj", lambda F, n, budget=None: GraphOracle.finite(n))
    code, report = run("roundtrip", "--graph", files["p3"])
    assert code == 1 and report["outcome"] == "check-failed"


def test_budget_exit_code(files):
    code, report = run("decode", "--graph", files["p3"], "--vertices", "3", "--budget", "5")
    assert code == 2 and report["outcome"] == "budget-exhausted"


def test_bad_input_exit_codes(files):
    assert run("roundtrip", "--graph", str(files["dir"] / "missing.txt"))[0] == 3
    assert run("frobnicate")[0] == 3
    assert run("transport", "--graph", files["p3"], "--morphism", files["bad"])[0] == 3


def test_transport(files):
    code, report = run("transport", "--graph", files["p3"], "--morphism", files["flip"],
                       "--samples", "10")
    assert code == 0 and report["result"]["recovered"] == {"map": [2, 1, 0]}
    assert report["result"]["ops_preserved"]


def test_build_scramble_and_dump_decode(files):
    d = files["dir"]
    code, report = run("build", "--graph", files["p3"], "--bound", "20", "--out", str(d / "p3.dump"))
    assert code == 0
    lines = (d / "p3.dump").read_text().splitlines()
    assert lines[0].startswith("# ") and json.loads(lines[0][2:])["bound"] == 20
    code, report = run("scramble", "--dump", str(d / "p3.dump"), "--swaps", "3", "--swap-bound", "20",
                       "--bound", "20", "--out", str(d / "s.dump"))
    assert code == 0 and len(report["inputs"]["permutation"]["swaps"]) == 3
    # a bounded table cannot answer the products the point search needs
    code, report = run("decode", "--dump", str(d / "p3.dump"), "--vertices", "1")
    assert code == 2


def test_reports_are_deterministic(files):
    a = run("roundtrip", "--graph", files["p3"], "--swaps", "4", "--seed", "9")[1]
    b = run("roundtrip", "--graph", files["p3"], "--swaps", "4", "--seed", "9")[1]
    a.pop("timings"), b.pop("timings")
    assert a == b
