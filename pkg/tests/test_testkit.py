from __future__ import annotations

import json
import random

from amt.executor import instantiate
from amt.model import ObjDecl, ObjectDiagram, LinkDecl
from amt.expr import Lit
from amt.syntax import parse, parse_messages
from amt.testkit import (
    ERROR, FAIL, PASS, AssertionFalse, ObservationMismatch, OracleUnmatched, check_conformance,
    match_od, run_suite, run_test,
)
from amt.testkit.runner import InvariantViolated

from conftest import load
from oracles import OD_MODEL, brute_match, random_config, random_pattern


def test_matcher_against_oracle():
    model = parse(OD_MODEL)
    rng = random.Random(5)
    hits = 0
    for _ in range(300):
        cfg = random_config(rng)
        pat = random_pattern(rng, cfg)
        anchors = {p.name: cfg.by_name[p.name] for p in pat.objects if p.name in cfg.by_name}
        got = match_od(model, pat, cfg, anchors)
        assert bool(got) == brute_match(model, pat, cfg, anchors)
        if got:
            hits += 1
            m = got.as_dict()
            assert len(set(m.values())) == len(m)  # injective
    assert 30 < hits < 270  # both outcomes exercised


def test_matcher_partial_mapping_on_failure():
    model = parse(OD_MODEL)
    from amt.config import Configuration, ObjState
    cfg = Configuration((ObjState(0, "c0", "Node", (("w", 1),)),), (), (), 1)
    pat = ObjectDiagram("", (ObjDecl("x", "Node", (("w", Lit("Integer", 1)),)),
                             ObjDecl("y", "Leaf")))
    r = match_od(model, pat, cfg, {})
    assert not r and r.as_dict() == {"x": 0}


def test_conformance_projection():
    exp = parse_messages("a -> b.f(); a -> b.g(1);")
    from amt.executor.runtime import TraceEntry
    tr = [TraceEntry("send", "a", "b", "f", ()), TraceEntry("send", "a", "c", "h", ()),
          TraceEntry("send", "a", "b", "g", (1,))]
    assert check_conformance(exp, tr) is None
    bad = check_conformance(exp[:1], tr)
    assert isinstance(bad, ObservationMismatch)
    assert bad.to_json()["actual"] == ["a -> b.f()", "a -> b.g(1)"]


def test_bank_suite(bank):
    report = run_suite(bank)
    assert report.summary() == "1 passed, 0 failed, 0 errors"
    assert report.ok


def with_tests(base: str, tests: str):
    text = base.rstrip().rstrip("}") + tests + "\n}\n"
    return parse(text)


BANK = load.__globals__["MODELS"].joinpath("bank.amt").read_text()


def test_fail_reasons_accumulate():
    m = with_tests(BANK, """
  test Wrong {
    fixture F1;
    sd { trigger: env -> a1.deposit(50);
         assert a1.balance = 1;
         assert a1.balance = 2; }
    oracle { a1 : Account { balance = 3; } }
  }""")
    r = run_test(m, m.test("Wrong"))
    assert r.verdict.kind == FAIL
    kinds = [type(x) for x in r.verdict.reasons]
    assert kinds == [AssertionFalse, AssertionFalse, OracleUnmatched]
    j = r.to_json(timing=False)
    assert j["reasons"][0]["bindings"] == {"a1": "Account(balance=150, state=Open)"}


def test_error_verdicts():
    m = with_tests(BANK, """
  test Undef {
    fixture F1;
    sd { trigger: env -> a1.deposit(1);
         assert a1.balance / 0 = 1; }
  }""")
    assert run_test(m, m.test("Undef")).verdict.kind == ERROR


def test_existential_oracle_object():
    m = with_tests(BANK, """
  test Exists {
    fixture F1;
    sd { trigger: env -> a1.withdraw(200); }
    oracle { someone : Account { state = Frozen; } }
  }""")
    assert run_test(m, m.test("Exists")).verdict.kind == PASS


def test_invariant_violation_reported():
    m = parse("""model V { class C { attr x: Integer; op dec(); inv x >= 0;
      statechart { initial S; state S; transition S -> S on dec / { x := x - 1; }; } }
      objects F { c : C { } }
      test T { fixture F; sd { trigger: env -> c.dec(); env -> c.dec(); } } }""")
    r = run_test(m, m.test("T"))
    assert r.verdict.kind == FAIL
    assert [type(x) for x in r.verdict.reasons] == [InvariantViolated]
    r2 = run_test(m, m.test("T"), check="each-step")
    assert len(r2.verdict.reasons) == 1


def test_jobs_do_not_change_report():
    m = load("library.amt")
    a = run_suite(m, jobs=1).to_json(timing=False)
    b = run_suite(m, jobs=8).to_json(timing=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert "wall_ms" in run_suite(m).to_json()
