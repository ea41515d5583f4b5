import json
from pathlib import Path

import pytest

from stratepi.cli import main

MODELS = Path(__file__).resolve().parent.parent / "models"
G1 = str(MODELS / "g1.model")
G3 = str(MODELS / "g3.model")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_true(capsys):
    code, out, _ = run(capsys, "check", G1, "--state", "Z1", "--formula", "K[b] X p")
    assert code == 0 and out.strip() == "TRUE"


def test_check_common(capsys):
    code, out, _ = run(capsys, "check", G3, "--state", "Zck", "--formula", "C[{a,b}] p", "--ck-depth", "6")
    assert code == 0 and out.strip() == "TRUE@DEPTH 6"


def test_check_trace_shows_alternative_strategy(capsys):
    code, out, _ = run(capsys, "check", G1, "--state", "Zempty", "--formula", "K[b] X p", "--trace")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "FALSE"
    assert "v1->beta" in lines[1]


def test_file_queries_self_check(capsys):
    code, out, _ = run(capsys, "check", G3)
    assert code == 0
    assert out.count("ok") == out.count("\n")


def test_expectation_mismatch_exits_one(capsys):
    code, _, _ = run(capsys, "check", G1, "--state", "Zempty", "--formula", "K[b] X p", "--expect", "TRUE")
    assert code == 1


@pytest.mark.parametrize(
    "argv, code",
    [
        (["check", G1, "--state", "nope", "--formula", "p"], 2),
        (["check", G1, "--state", "Z1", "--formula", "K[b"], 2),
        (["check", G1, "--state", "Z1", "--formula", "X X p", "--horizon", "1"], 2),
        (["check", "/nonexistent.model"], 2),
        (["check", G1, "--state", "Zempty", "--formula", "K[b] K[a] X p", "--budget", "2"], 3),
    ],
)
def test_error_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err.startswith("error:")


def test_json_is_stable_modulo_timing(capsys):
    argv = ["check", G1, "--state", "Zempty", "--formula", "K[b] X p", "--trace", "--json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    a, b = json.loads(first), json.loads(second)
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert a == b
    assert a["verdict"] == "FALSE" and a["trace"][0]["strategies"]["a"]["table"] == [["v1", "beta"]]


def test_json_without_trace_has_no_witness(capsys):
    _, out, _ = run(capsys, "check", G3, "--query", "common_missing2", "--json")
    rec = json.loads(out)
    assert rec["verdict"] == "FALSE(witness)" and "trace" not in rec and rec["pass"]


def test_axioms_command(capsys):
    code, out, _ = run(capsys, "axioms", "--samples", "20", "--seed", "3")
    assert code == 0
    assert "negative introspection countermodel" in out
    code, out2, _ = run(capsys, "axioms", "--samples", "20", "--seed", "3", "--json")
    report = json.loads(out2)
    assert all(r["violations"] == 0 for r in report["results"])


def test_axioms_on_model_file(capsys):
    code, out, _ = run(capsys, "axioms", str(MODELS / "g1_full.model"), "--samples", "30")
    assert code == 0 and "FAIL" not in out


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--cases", "50")
    assert code == 0
    assert "50/50" in out and "FAIL" not in out


def test_export(capsys, tmp_path):
    code, out, _ = run(capsys, "scenarios", "export", "g1")
    assert code == 0 and out == (MODELS / "g1.model").read_text()
    target = tmp_path / "g2.model"
    run(capsys, "scenarios", "export", "g2", "-o", str(target))
    assert target.read_text() == (MODELS / "g2.model").read_text()
    code, out, _ = run(capsys, "scenarios", "list")
    assert "g3" in out
