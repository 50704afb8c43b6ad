"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines appear at
the end of the session.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager

import pytest

from amt.cli import main
from amt.config import Event
from amt.evolution import applicable_sites, pipeline, regress
from amt.executor import (
    SynthesisError, instantiate, make_event, run_script, trace_to_json, with_synthesized,
)
from amt.executor.synthesis import scenario_only_classes
from amt.expr import Binary, Name
from amt.generator import TRANSITION, ValuePool, explore, generate, measure
from amt.ocl.evaluate import EvalContext, eval_expr
from amt.syntax import parse, parse_messages, print_model
from amt.testkit import PASS, match_od, run_test

from conftest import MODELS, load
from oracles import (
    ITEM_MODEL, OD_MODEL, brute_eval, brute_match, brute_reach, random_config, random_pattern,
    random_quantified, random_snapshot, snapshot_config, to_expr,
)
from test_ocl import KLEENE
from test_synthesis import replay_sd

_LINES: list[str] = []


@pytest.fixture(scope="module", autouse=True)
def _summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_sep("=", "acceptance criteria")
        for line in _LINES:
            reporter.write_line(line)
    else:
        print("\n".join(_LINES))


@contextmanager
def criterion(n: int, title: str, limit: float | None = None):
    """Record one PASS/FAIL line; ``detail`` entries are appended to it."""
    detail: list[str] = []
    t0 = time.perf_counter()
    try:
        yield detail
        elapsed = time.perf_counter() - t0
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
    except BaseException as e:
        _LINES.append(f"[FAIL] {n}. {title}: {e}".splitlines()[0])
        raise
    elapsed = time.perf_counter() - t0
    _LINES.append(f"[PASS] {n}. {title} ({'; '.join(detail)}; {elapsed:.2f}s)")


def corpus():
    return sorted(MODELS.glob("*.amt"))


def test_1_round_trip():
    with criterion(1, "round-trip law over the corpus", limit=5) as d:
        files = corpus()
        assert len(files) >= 20
        assert (MODELS / "bank.amt") in files
        assert sum(p.name.startswith("adv_") for p in files) >= 3
        for p in files:
            m = parse(p.read_text(encoding="utf-8"), str(p))
            printed = print_model(m)
            assert parse(printed) == m, p.name
            assert print_model(parse(printed)) == printed, p.name
        d.append(f"{len(files)} files")


def test_2_ocl_oracle():
    with criterion(2, "OCL evaluation agrees with brute-force enumeration", limit=30) as d:
        model = parse(ITEM_MODEL)
        rng = random.Random(2024)
        cases = 0
        for _ in range(1500):
            objs = random_snapshot(rng)
            e = random_quantified(rng)
            got = eval_expr(to_expr(e), EvalContext(model, snapshot_config(objs)))
            assert got is brute_eval(e, objs), e
            cases += 1
        from amt.config import Configuration
        entries = 0
        for op, table in KLEENE.items():
            for (l, r), want in table.items():
                ctx = EvalContext(model, Configuration(), {"p": l, "q": r})
                assert eval_expr(Binary(op, Name("p"), Name("q")), ctx) is want
                entries += 1
        assert entries == 27
        d.append(f"{cases} random cases, {entries} truth-table entries")


def test_3_od_matcher():
    with criterion(3, "OD matcher agrees with injective-mapping enumeration", limit=30) as d:
        model = parse(OD_MODEL)
        rng = random.Random(99)
        matched = 0
        for _ in range(600):
            cfg = random_config(rng, 6)
            pat = random_pattern(rng, cfg, 4)
            anchors = {p.name: cfg.by_name[p.name] for p in pat.objects if p.name in cfg.by_name}
            got = bool(match_od(model, pat, cfg, anchors))
            assert got == brute_match(model, pat, cfg, anchors)
            matched += got
        d.append(f"600 pairs, {matched} matching")


def test_4_executor():
    with criterion(4, "executor determinism, conservation and bank values") as d:
        bank = load("bank.amt")
        cfg = instantiate(bank, "F1")
        rng = random.Random(4)
        amounts = [-1, 0, 1, 50, 100, 150, 200, 1000]
        for _ in range(1000):
            evs = [Event(0, rng.choice(("deposit", "withdraw")), (rng.choice(amounts),))
                   for _ in range(rng.randint(0, 10))]
            f1, t1 = run_script(bank, cfg, evs)
            f2, t2 = run_script(bank, cfg, evs)
            assert f1 == f2 and trace_to_json(t1) == trace_to_json(t2)
            assert len(f1.objects) == len(cfg.objects) and len(f1.links) == len(cfg.links)

        def after(text):
            final, trace = run_script(bank, cfg, [make_event(bank, cfg, m)
                                                  for m in parse_messages(text)])
            return final.obj(0), trace

        a, _ = after("a1.deposit(50);")
        assert (a.get("balance"), a.state) == (150, "Open")
        a, _ = after("a1.withdraw(200);")
        assert (a.get("balance"), a.state) == (100, "Frozen")
        a, trace = after("a1.deposit(-1);")
        assert trace[-1].kind == "dropped" and a.get("balance") == 100
        d.append("1000 scripts")


def test_5_generator():
    with criterion(5, "generator soundness and agreement", limit=10) as d:
        bank = load("bank.amt")
        pool = ValuePool().with_values(Integer=[-1, 0, 1, 50, 100, 200])
        gen = generate(bank, "F1", "Account", TRANSITION, pool)
        assert (len(gen.report.covered), len(gen.report.targets)) == (3, 3)
        assert all(run_test(bank, t).verdict.kind == PASS for t in gen.tests)
        m = measure(bank, gen.tests, "Account", TRANSITION)
        assert (len(m.covered), len(m.targets)) == (3, 3)
        d.append(f"bank 3/3 with {len(gen.tests)} tests")

        unsat = load("unsat_guard.amt")
        ug = generate(unsat, "F", "Valve", TRANSITION)
        assert any("purge" in t for t in ug.report.infeasible)

        small = [("unsat_guard.amt", "F", "Valve"), ("turnstile.amt", "F", "Gate"),
                 ("pullup_ops.amt", "F", "Thermo")]
        opool = {"Integer": [-1, 0, 1, 3, 45], "Boolean": [True, False], "String": [""],
                 "Real": [0.0]}
        for name, fx, cls in small:
            model = load(name)
            oracle = brute_reach(model, fx, cls, opool, limit=200)
            assert oracle is not None, f"{name} exceeds 200 configurations"
            g = explore(model, fx, cls, ValuePool().with_values(**opool))
            assert set(g.nodes) == oracle.configs
            assert {t for e in g.edges for _, t in e.fired} == oracle.fired
        d.append(f"{len(small)} reach graphs agree")


def test_6_synthesis():
    with criterion(6, "synthesized behavior replays its scenarios") as d:
        sets = sorted(MODELS.glob("synth_[0-9]*.amt"))
        conflicts = sorted(MODELS.glob("synth_conflict_*.amt"))
        assert len(sets) >= 10 and len(conflicts) >= 3
        replays = 0
        for p in sets:
            base = load(p.name)
            comps = set(scenario_only_classes(base))
            m = with_synthesized(base)
            for sd in m.sds:
                for got, want in replay_sd(m, sd, comps):
                    assert got == want, (p.name, sd.name)
                    replays += 1
        for p in conflicts:
            base = load(p.name)
            with pytest.raises(SynthesisError) as ei:
                with_synthesized(base)
            assert any(set(c.sds) == {sd.name for sd in base.sds} for c in ei.value.conflicts)
        d.append(f"{len(sets)} sets, {replays} lifeline replays, {len(conflicts)} conflicts")


def test_7_refactoring():
    with criterion(7, "refactorings preserve behavior; mutation control detected", limit=30) as d:
        sites = 0
        for p in corpus():
            m = load(p.name)
            try:
                before = with_synthesized(m)
            except SynthesisError:
                continue  # its scenarios cannot execute, so there is no behavior to compare
            for t in applicable_sites(m):
                r = pipeline(m, [t])
                rep = regress(before, with_synthesized(r.model), r.renames)
                assert rep.preserved, (p.name, t.spec())
                sites += 1
        text = (MODELS / "bank_audit.amt").read_text()
        audit = parse(text)
        assert "DepositZero" in {t.name for t in audit.tests}
        mutant = parse(text.replace("[amount > 0]", "[amount >= 0]", 1))
        assert not regress(audit, mutant).preserved
        d.append(f"{sites} sites preserved, mutant detected")


def _strip_timing(x):
    if isinstance(x, dict):
        return {k: _strip_timing(v) for k, v in x.items() if k not in ("ms", "wall_ms")}
    if isinstance(x, list):
        return [_strip_timing(v) for v in x]
    return x


def test_8_cli(tmp_path, capsys, monkeypatch):
    with criterion(8, "CLI scenarios and parallel determinism") as d:
        monkeypatch.setenv("AMT_COLOR", "0")
        bank = str(MODELS / "bank.amt")

        def amt(*argv):
            code = main(list(argv))
            return code, capsys.readouterr()

        code, out = amt("check", bank)
        assert code == 0 and out.out == "" and out.err == ""
        code, out = amt("test", bank)
        assert code == 0 and out.out.splitlines()[-1] == "1 passed, 0 failed, 0 errors"
        code, out = amt("refactor", bank, "--apply", "renameAttribute(Account,balance,bal)",
                        "--out", str(tmp_path / "bank2.amt"), "--check")
        assert code == 0 and out.out.splitlines()[-1] == "preserved: true"

        for argv in (["test", str(MODELS / "library.amt")],
                     ["refactor", str(MODELS / "fees.amt"), "--apply",
                      "pullUpAttribute(Account,fee)", "--out", str(tmp_path / "f.amt"), "--check"]):
            reports = []
            for jobs in ("1", "8"):
                path = tmp_path / f"r{jobs}.json"
                code, _ = amt(*argv, "--jobs", jobs, "--json", str(path))
                assert code == 0
                reports.append(_strip_timing(json.loads(path.read_text())))
            assert reports[0] == reports[1]
        d.append("3 examples, jobs 1 == jobs 8")
