from __future__ import annotations

import json

import pytest

from amt.cli import main
from amt.syntax import parse

from conftest import MODELS

BANK = str(MODELS / "bank.amt")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check(capsys):
    code, out, err = run(capsys, "check", BANK)
    assert (code, out, err) == (0, "", "")


def test_test_summary(capsys, monkeypatch):
    monkeypatch.setenv("AMT_COLOR", "0")
    code, out, _ = run(capsys, "test", BANK)
    assert code == 0
    assert out.splitlines()[-1] == "1 passed, 0 failed, 0 errors"


def test_refactor_check(capsys, tmp_path):
    dst = tmp_path / "bank2.amt"
    code, out, _ = run(capsys, "refactor", BANK, "--apply", "renameAttribute(Account,balance,bal)",
                       "--out", str(dst), "--check")
    assert code == 0 and out.splitlines()[-1] == "preserved: true"
    assert "bal" in dst.read_text()


def test_refactor_not_applicable(capsys, tmp_path):
    code, _, err = run(capsys, "refactor", BANK, "--apply", "renameClass(Account,Account)",
                       "--out", str(tmp_path / "x.amt"))
    assert code == 2 and "E_NAME_TAKEN" in err


def test_failing_suite_exits_1(capsys, tmp_path):
    bad = tmp_path / "bad.amt"
    bad.write_text((MODELS / "bank.amt").read_text().replace("balance = 150;", "balance = 1;", 1))
    code, out, _ = run(capsys, "test", str(bad))
    assert code == 1 and "0 passed, 1 failed" in out


@pytest.mark.parametrize("argv", [["check", "/nonexistent.amt"], ["frobnicate"], ["test"],
                                  ["gen", BANK, "--class", "Account"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_parse_error_exit(capsys, tmp_path):
    f = tmp_path / "e.amt"
    f.write_text("model M { class }")
    code, _, err = run(capsys, "check", str(f))
    assert code == 2 and f"{f}:1:17:" in err


def test_gen_writes_tests(capsys, tmp_path):
    pool = tmp_path / "pool.json"
    pool.write_text(json.dumps({"Integer": [-1, 0, 1, 50, 100, 200]}))
    out = tmp_path / "g.amt"
    code, stdout, _ = run(capsys, "gen", BANK, "--class", "Account", "--fixture", "F1",
                          "--coverage", "transition", "--pool", str(pool), "--out", str(out))
    assert code == 0
    assert json.loads(stdout)["ratio"] == 1.0
    m = parse(out.read_text())
    assert len(m.tests) == 4
    code, stdout, _ = run(capsys, "test", str(out))
    assert code == 0 and stdout.splitlines()[-1] == "4 passed, 0 failed, 0 errors"


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", BANK, "--fixture", "F1",
                       "--events", "a1.deposit(50); a1.withdraw(500);")
    assert code == 0
    assert out.splitlines()[-1].strip() == "a1 : Account { balance = 150; state = Frozen; }"
    code, out, _ = run(capsys, "simulate", BANK, "--fixture", "F1", "--events", "a1.deposit(1);",
                       "--json")
    data = json.loads(out)
    assert data["final"][0]["attrs"] == {"balance": 101}


def test_jobs_json_equal_modulo_timing(capsys, tmp_path):
    model = str(MODELS / "library.amt")
    reports = []
    for jobs in ("1", "8"):
        path = tmp_path / f"r{jobs}.json"
        assert run(capsys, "test", model, "--jobs", jobs, "--json", str(path))[0] == 0
        reports.append(strip_timing(json.loads(path.read_text())))
    assert reports[0] == reports[1]


def strip_timing(x):
    if isinstance(x, dict):
        return {k: strip_timing(v) for k, v in x.items() if k not in ("ms", "wall_ms")}
    if isinstance(x, list):
        return [strip_timing(v) for v in x]
    return x


def test_scenario_conflict_exits_2(capsys):
    code, _, err = run(capsys, "test", str(MODELS / "synth_conflict_1.amt"))
    assert code == 2 and "Accept" in err and "Reject" in err


def test_merge_duplicate_names_exit_2(capsys):
    code, _, err = run(capsys, "check", BANK, str(MODELS / "bank_audit.amt"))
    assert code == 2 and "E_DUP_NAME" in err


def test_merge_distinct_files(capsys):
    code, _, _ = run(capsys, "check", BANK, str(MODELS / "turnstile.amt"))
    assert code == 0
