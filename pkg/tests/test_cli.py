import json

import pytest

from infralog import io
from infralog.cli import main
from infralog.harness.generators import set_system_pool
from infralog.semantics import holds_equality_axioms


@pytest.fixture
def ws(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    pool = set_system_pool()
    io.save_system(pool[2], "a.json")
    io.save_system(pool[3], "b.json")
    (tmp_path / "fam.json").write_text(json.dumps({"index_set": ["f1", "f2"], "systems": ["a.json", "b.json"]}))
    (tmp_path / "D.json").write_text(json.dumps({"index_set": ["f1", "f2"], "principal_at": "f1"}))
    (tmp_path / "bad.json").write_text(json.dumps({"index_set": ["f1", "f2"], "members": [["f1"], ["f2"]]}))
    (tmp_path / "frac.json").write_text(json.dumps({"generators": {"kind": "fractions", "N": 1}}))
    return tmp_path


def test_check_fractions(ws, capsys):
    assert main(["check", "frac.json", "A x:0 . x =0 x"]) == 0
    assert capsys.readouterr().out.strip() == "true"
    e4 = "A u:[0] . A v:[0] . A x:0 . A y:0 . x =0 y & u =[0] v -> (x in[0] u <-> y in[0] v)"
    assert main(["check", "frac.json", e4]) == 0
    assert capsys.readouterr().out.strip() == "true"


def test_check_open_formula_needs_evaluation(ws, capsys):
    assert main(["check", "frac.json", "x =0 x"]) == 2
    assert "free variables" in capsys.readouterr().err
    (ws / "ev.json").write_text(json.dumps({"x:0": "1/1"}))
    assert main(["check", "frac.json", "x =0 x", "-e", "ev.json"]) == 0


def test_check_parse_error(ws, capsys):
    (ws / "f.txt").write_text("A x:0 . x =0 x\nA x:0 . x =0\n")
    assert main(["check", "a.json", "f.txt"]) == 2
    assert "f.txt:2:" in capsys.readouterr().err


def test_infraproduct(ws, capsys):
    assert main(["infraproduct", "fam.json", "D.json", "out.json"]) == 0
    assert "carrier size 4" in capsys.readouterr().out
    P = io.load_system("out.json")
    assert P.n == 4 and holds_equality_axioms(P)
    assert main(["infraproduct", "fam.json", "bad.json", "out2.json"]) == 2
    assert "not a filter" in capsys.readouterr().err


def test_infrapower(ws, capsys):
    assert main(["infrapower", "a.json", "D.json", "p.json", "--check-axioms"]) == 0
    out = capsys.readouterr().out
    assert "carrier size 4" in out and "hold" in out


def test_budget_exit(ws, capsys):
    assert main(["--max-terminal", "16", "check", "frac.json", "A u:[0] . u =[0] u"]) == 3
    assert "budget" in capsys.readouterr().err


def test_axioms_and_examples(ws, capsys):
    assert main(["axioms", "--name", "A5"]) == 0
    assert capsys.readouterr().out == "# A5\n!one =0 zero\n"
    assert main(["axioms", "--json"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 29
    assert main(["examples", "--out", "ex", "--N", "1", "--expand"]) == 0
    assert io.load_system("ex/fractions.json").n == 6


def test_verify_counterexample_and_zero(ws, capsys):
    assert main(["verify", "--suite", "counterexample-standard"]) == 0
    out = capsys.readouterr().out
    assert "standard-semantics witness" in out
    rep = json.loads((ws / "suite-report.json").read_text())
    assert rep["passed"] and rep["checks"][0]["id"] == "counterexample-standard"
    assert main(["verify", "--suite", "nonsense"]) == 2


def test_verify_seed_env(ws, monkeypatch):
    monkeypatch.setenv("INFRALOG_SEED", "11")
    assert main(["verify", "--suite", "normalization", "--quick", "--report", "r1.json"]) == 0
    monkeypatch.delenv("INFRALOG_SEED")
    assert main(["verify", "--suite", "normalization", "--quick", "--seed", "11", "--report", "r2.json"]) == 0
    assert (ws / "r1.json").read_bytes() == (ws / "r2.json").read_bytes()
