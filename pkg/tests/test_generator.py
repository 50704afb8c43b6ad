from __future__ import annotations

import pytest

from amt.generator import (
    PATH, STATE, TRANSITION, Bounds, ValuePool, explore, generate, measure, targets,
)
from amt.testkit import PASS, run_test

from conftest import load
from oracles import brute_reach

BANK_POOL = ValuePool().with_values(Integer=[-1, 0, 1, 50, 100, 200])


def test_targets(bank):
    assert targets(bank, "Account", STATE) == ["Account.Open", "Account.Frozen"]
    ts = targets(bank, "Account", TRANSITION)
    assert len(ts) == 3 and ts[0].startswith("Account.Open->Open@deposit#1")
    paths = targets(bank, "Account", PATH, 2)
    # t1,t2 end in Open (3 successors each), t3 ends in Frozen (none)
    assert len(paths) == 3 + 6


def test_bank_transition_coverage(bank):
    gen = generate(bank, "F1", "Account", TRANSITION, BANK_POOL)
    assert gen.report.ratio == 1.0 and gen.report.uncovered == []
    assert len(gen.tests) == 3
    for t in gen.tests:
        assert run_test(bank, t).verdict.kind == PASS
    assert measure(bank, gen.tests, "Account", TRANSITION).ratio == 1.0


def test_default_pool_leaves_overdraw_unreachable_within_bounds(bank):
    gen = generate(bank, "F1", "Account", TRANSITION, ValuePool(), Bounds(max_depth=6))
    assert gen.report.covered == gen.report.targets[:2]
    assert gen.report.infeasible == gen.report.targets[2:]


def test_unsatisfiable_guard_is_infeasible():
    m = load("unsat_guard.amt")
    gen = generate(m, "F", "Valve", TRANSITION)
    assert [t.split("@")[1] for t in gen.report.infeasible] == ["purge#3", "close#4"]
    assert gen.report.ratio == 0.5
    st = generate(m, "F", "Valve", STATE)
    assert st.report.infeasible == ["Valve.Purging"]


@pytest.mark.parametrize("name,fixture,cls", [
    ("unsat_guard.amt", "F", "Valve"), ("turnstile.amt", "F", "Gate"),
    ("pullup_ops.amt", "F", "Thermo"),
])
def test_explore_matches_fixpoint(name, fixture, cls):
    m = load(name)
    pool = {"Integer": [-1, 0, 1, 3], "Boolean": [True, False], "String": [""], "Real": [0.0]}
    oracle = brute_reach(m, fixture, cls, pool)
    assert oracle is not None
    vp = ValuePool().with_values(**pool)
    g = explore(m, fixture, cls, vp)
    assert not g.truncated
    assert set(g.nodes) == oracle.configs
    assert {t for e in g.edges for _, t in e.fired} == oracle.fired


def test_path_coverage_and_generated_names(bank):
    gen = generate(bank, "F1", "Account", PATH, BANK_POOL, k=2)
    assert gen.report.ratio == 1.0
    names = [t.name for t in gen.tests]
    assert names == [f"gen_path_{i}" for i in range(1, len(names) + 1)]
    assert measure(bank, gen.tests, "Account", PATH, 2).ratio == 1.0


def test_value_pool_json():
    p = ValuePool.from_json('{"Integer": [5], "String": ["a"]}')
    assert p.of("Integer") == (5,) or list(p.of("Integer")) == [5]
    with pytest.raises(ValueError):
        ValuePool.from_json('{"Integer": ["x"]}')
