import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

import kassign.verify as verify
from kassign.arith import parse_rational
from kassign.cli import dispatch
from kassign.serialize import loads, parse_cost_matrix

GOLDEN = sorted((Path(__file__).parent / "golden").glob("*.json"))


def run(argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = dispatch(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("path", GOLDEN, ids=[p.stem for p in GOLDEN])
def test_golden(path):
    doc = json.loads(path.read_text())
    code, out, _ = run(doc["argv"])
    assert code == 0
    assert out.endswith("\n") and out.count("\n") == 1
    assert json.loads(out) == doc["output"]


def test_documented_examples():
    _, out, _ = run(["formula", "--k", "2", "--rates", '{"r":["1","1","1"],"c":["1","1","1"]}'])
    assert json.loads(out)["value"] == "4/9"
    _, out, _ = run(["exact", "--k", "2", "--matrix", '{"rows":2,"cols":2,"entries":[[1,1],[1,1]]}'])
    assert json.loads(out)["value"] == "5/4"
    _, out, _ = run(["solve", "--k", "2", "--matrix", '{"rows":2,"cols":2,"entries":[[1,2],[3,5]]}'])
    doc = json.loads(out)
    assert parse_rational(doc["value"]) == 5
    assert doc["minimizers"] == [[[1, 2], [2, 1]]]


@pytest.mark.parametrize("form", ["main", "negbinom", "inclexcl", "urn", "flag", "fg"])
def test_formula_forms(form):
    _, out, _ = run(["formula", "--k", "2", "--form", form, "--rates", '{"r":[1,1],"c":[1,1]}'])
    assert json.loads(out)["value"] == "5/4"


def test_round_trip_reduce():
    _, out, _ = run(["reduce", "--k", "2", "--matrix", '{"entries":[[4,1,3],[2,0,5],[3,2,2]]}'])
    doc = json.loads(out)
    Y = parse_cost_matrix(loads(json.dumps(doc["reduced"])))
    assert len(Y) == 3 and len(Y[0]) == 3
    for g in doc["generators"]:
        assert parse_rational(g["coefficient"]) > 0
        assert len(g["rows"]) + len(g["cols"]) < 2


def test_decimal_and_string_scalars():
    _, out, _ = run(["formula", "--k", "1", "--rates", '{"r":[0.5,"1/2"],"c":[2]}'])
    assert json.loads(out)["value"] == "1/2"


def test_stdin_and_file_input(tmp_path, monkeypatch):
    doc = '{"r":[1,1,1],"c":[1,1,1]}'
    code, out, _ = run(["formula", "--k", "2", "--rates", "-"], stdin=doc, monkeypatch=monkeypatch)
    assert code == 0 and json.loads(out)["value"] == "4/9"
    f = tmp_path / "rates.json"
    f.write_text(doc)
    code, out, _ = run(["formula", "--k", "2", "--rates", f"@{f}"])
    assert code == 0 and json.loads(out)["value"] == "4/9"


@pytest.mark.parametrize(
    ("argv", "code"),
    [
        (["solve", "--k", "1", "--matrix", "{not json"], 2),
        (["solve", "--k", "1", "--matrix", '{"rows":2}'], 2),
        (["solve", "--k", "1", "--matrix", '{"entries":[[1,2],[3]]}'], 2),
        (["solve", "--k", "1", "--matrix", '{"rows":3,"entries":[[1,2],[3,4]]}'], 2),
        (["formula", "--k", "1", "--rates", '{"r":[1]}'], 2),
        (["formula", "--k", "1", "--rates", '{"r":["x"],"c":[1]}'], 2),
        (["formula", "--k", "1", "--rates", "@/no/such/file"], 2),
        (["solve", "--k", "3", "--matrix", '{"entries":[[1,2],[3,5]]}'], 3),
        (["solve", "--k", "1", "--matrix", '{"entries":[[1,-2]]}'], 3),
        (["formula", "--k", "1", "--rates", '{"r":[0],"c":[1]}'], 3),
        (["exact", "--k", "3", "--matrix", '{"entries":[[1,1],[1,1]]}'], 3),
        (["exact", "--k", "1", "--mod-p", "7", "--matrix", '{"entries":[["1/7"]]}'], 3),
        (["solve", "--k", "1"], 2),
    ],
)
def test_exit_codes(argv, code):
    got, out, err = run(argv)
    assert got == code
    assert out == ""
    if code != 2 or "--matrix" in argv or "--rates" in argv:
        assert err


def test_verify_exit_codes(monkeypatch):
    code, out, _ = run(["verify", "--suite", "basic", "--trials", "1"])
    assert code == 0 and json.loads(out)["summary"]["passed"]

    monkeypatch.setattr(verify, "basic_identity_sides", lambda c, H, L: (0, 1))
    code, out, err = run(["verify", "--suite", "basic", "--trials", "1"])
    assert code == 5 and "bug" in err
    assert json.loads(out)["summary"]["proved_failures"] > 0
    monkeypatch.undo()

    monkeypatch.setattr(verify, "expected_min_exact", lambda A, k: A[0][0])
    real = verify.check_exact_vs_formula

    def only_k4(k, *args, **kw):
        if k < 4:
            return verify._finish(verify._new_report("exact", "proved", "modular", {"k": k}, 0))
        return real(k, *args, **kw)

    monkeypatch.setattr(verify, "check_exact_vs_formula", only_k4)
    code, out, err = run(["verify", "--suite", "exact4", "--trials", "1"])
    assert code == 4
    doc = json.loads(out)
    assert doc["summary"]["conjectural_mismatches"] == 1
    assert doc["reports"][-1]["status"] == "conjectural"


def test_simulate_outputs():
    code, out, _ = run(["simulate", "--k", "2", "--rates", '{"r":[1,1],"c":[1,1]}',
                        "--samples", "2000", "--chunks", "2"])
    doc = json.loads(out)
    assert code == 0 and doc["evidence_only"]
    assert {"mean", "stderr", "samples", "target", "z"} <= set(doc["report"])
    code2, out2, _ = run(["simulate", "--k", "2", "--rates", '{"r":[1,1],"c":[1,1]}',
                          "--samples", "2000", "--chunks", "2", "--threads", "2"])
    assert out2 == out
    for mode in ("flags", "contribution", "collapsed"):
        code, out, _ = run(["simulate", "--k", "2", "--mode", mode, "--samples", "500",
                            "--rates", '{"r":[1,2,1],"c":[1,1,3]}'])
        assert code == 0 and json.loads(out)["mode"] == mode
    code, _, err = run(["simulate", "--k", "1", "--mode", "flags", "--samples", "5",
                        "--matrix", '{"entries":[[1]]}'])
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kassign", "formula", "--k", "1", "--rates", '{"r":[1,2],"c":[1,1]}'],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"form": "main", "k": 1, "value": "1/6"}
