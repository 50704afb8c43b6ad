from __future__ import annotations

import pytest

from amt.executor import SynthesisError, instantiate, make_event, run_script, synthesize, with_synthesized
from amt.executor.synthesis import emitted, receives, scenario_only_classes
from amt.model import lifeline_class
from amt.ocl.values import to_json
from amt.testkit import run_suite

from conftest import MODELS, load

SETS = sorted(p.name for p in MODELS.glob("synth_[0-9]*.amt"))
CONFLICTS = sorted(p.name for p in MODELS.glob("synth_conflict_*.amt"))


def replay_sd(model, sd, comps):
    """Feed the component lifelines the receives of ``sd`` in order; return
    what each emitted, next to what the scenario says it emits."""
    out = []
    fixture = model.fixtures[0].name
    for ll in dict.fromkeys(m.receiver for m in sd.messages):
        if lifeline_class(model, ll) not in comps:
            continue
        cfg = instantiate(model, fixture)
        evs = [make_event(model, cfg, m) for m in receives(sd, ll)]
        _, trace = run_script(model, cfg, evs)
        got = [(dst, op, tuple(to_json(a) for a in args)) for dst, op, args in emitted(trace, ll)]
        want = [(m.receiver, m.op, tuple(a.value for a in m.args))
                for m in sd.messages if m.sender == ll]
        out.append((got, want))
    return out


def test_enough_sets():
    assert len(SETS) >= 10 and len(CONFLICTS) >= 3


@pytest.mark.parametrize("name", SETS)
def test_replay_reproduces_emits(name):
    base = load(name)
    comps = set(scenario_only_classes(base))
    m = with_synthesized(base)
    pairs = [p for sd in m.sds for p in replay_sd(m, sd, comps)]
    assert pairs
    for got, want in pairs:
        assert got == want


@pytest.mark.parametrize("name", SETS)
def test_model_tests_pass_with_synthesized_behavior(name):
    assert run_suite(with_synthesized(load(name))).ok


@pytest.mark.parametrize("name", CONFLICTS)
def test_conflicts_name_both_scenarios(name):
    m = load(name)
    with pytest.raises(SynthesisError) as ei:
        with_synthesized(m)
    c = ei.value.conflicts[0]
    assert c.kind == "divergent"
    assert set(c.sds) == {sd.name for sd in m.sds}


def test_states_and_guards():
    m = load("synth_02_door.amt")
    sc = synthesize(m, "Lock", m.sds)
    # root; code(42); code(7); then lockNow and code(42) below them
    assert sc.initial == "S0" and len(sc.states) == 5
    ops = [(t.source, t.event) for t in sc.transitions]
    assert ops[0] == ("S0", "code")
    assert all(t.guard is not None for t in sc.transitions if t.event == "code")


def test_undeclared_operation_conflict():
    from amt.syntax import parse
    m = parse("""model U { class C { op f(); } objects F { c : C { } }
      sd S { env -> c.g(); } }""")
    with pytest.raises(SynthesisError) as ei:
        synthesize(m, "C", m.sds)
    assert ei.value.conflicts[0].kind == "undeclared"
