from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from amt.config import Configuration
from amt.expr import Binary, Name
from amt.ocl.evaluate import EvalContext, eval_expr, values_equal
from amt.ocl.invariants import check_invariants
from amt.ocl.typecheck import TypeEnv, TypeCheckError, typecheck
from amt.ocl.types import ClassType
from amt.ocl.values import UNDEFINED
from amt.syntax import format_expr, parse, parse_constraint

from oracles import ITEM_MODEL, brute_eval, random_quantified, random_snapshot, snapshot_config, to_expr

T, F, U = True, False, UNDEFINED

# strong Kleene tables, written out by hand: (left, right) -> result
KLEENE = {
    "and": {(T, T): T, (T, F): F, (T, U): U, (F, T): F, (F, F): F, (F, U): F,
            (U, T): U, (U, F): F, (U, U): U},
    "or": {(T, T): T, (T, F): T, (T, U): T, (F, T): T, (F, F): F, (F, U): U,
           (U, T): T, (U, F): U, (U, U): U},
    "implies": {(T, T): T, (T, F): F, (T, U): U, (F, T): T, (F, F): T, (F, U): T,
                (U, T): T, (U, F): U, (U, U): U},
}

EMPTY = parse("model E { class C { attr x: Integer; } }")


def ev(text: str, model=EMPTY, config: Configuration = Configuration(), **bindings):
    return eval_expr(parse_constraint(text), EvalContext(model, config, bindings))


@pytest.mark.parametrize("op", sorted(KLEENE))
def test_kleene_tables(op):
    for (l, r), want in KLEENE[op].items():
        got = eval_expr(Binary(op, Name("p"), Name("q")), EvalContext(EMPTY, Configuration(),
                                                                    {"p": l, "q": r}))
        assert got is want, (op, l, r)


def test_not_undefined():
    assert ev("not p", p=U) is U
    assert ev("not p", p=T) is F


@pytest.mark.parametrize("text,want", [
    ("7 / 2", 3.5), ("6 / 3", 2.0), ("7 mod 3", 1), ("-7 mod 3", -1), ("7 mod -3", 1),
    ("2 + 3 * 4", 14), ("(2 + 3) * 4", 20), ("10 - 4 - 3", 3), ("-(2 - 5)", 3),
    ("1 = 1.0", True), ("1 <> 2", True), ("\"a\" = \"a\"", True), ("true = true", True),
])
def test_arithmetic(text, want):
    got = ev(text)
    assert got == want and type(got) is type(want)


@pytest.mark.parametrize("text", ["1 / 0", "1 mod 0", "1 / 0 + 1", "1 / 0 = 1 / 0",
                                  "1 / 0 < 2"])
def test_strict_operators_propagate_undefined(text):
    assert ev(text) is U


def test_short_circuit_over_undefined():
    assert ev("false and 1 / 0 = 1") is F
    assert ev("true or 1 / 0 = 1") is T
    assert ev("false implies 1 / 0 = 1") is T


def test_bool_and_int_distinct():
    assert not values_equal(True, 1)
    assert values_equal(2, 2.0)


def test_int_overflow_is_undefined():
    assert ev("9223372036854775807 + 1") is U


@given(st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_arithmetic_matches_python(a, b):
    assert ev("x + y", x=a, y=b) == a + b
    assert ev("x * y", x=a, y=b) == a * b
    if b != 0:
        assert ev("x / y", x=a, y=b) == a / b
        r = ev("x mod y", x=a, y=b)
        assert r == a - b * int(a / b) and abs(r) < abs(b)


def test_quantifiers_against_oracle_small():
    model = parse(ITEM_MODEL)
    rng = random.Random(7)
    for _ in range(200):
        objs = random_snapshot(rng)
        e = random_quantified(rng)
        ast = to_expr(e)
        assert eval_expr(ast, EvalContext(model, snapshot_config(objs))) is brute_eval(e, objs)
        # the printed form parses back to the same value
        reparsed = parse_constraint(format_expr(ast))
        assert eval_expr(reparsed, EvalContext(model, snapshot_config(objs))) is brute_eval(e, objs)


def test_collect_sum_and_includes():
    model = parse(ITEM_MODEL)
    cfg = snapshot_config([{"a": 1, "b": 2, "c": True}, {"a": -1, "b": 3, "c": False}])
    assert ev("Item.allInstances()->collect(i | i.b)->sum()", model, cfg) == 5
    assert ev("Item.allInstances()->collect(i | i.a)->includes(-1)", model, cfg) is T
    assert ev("Item.allInstances()->select(i | i.c)->size()", model, cfg) == 1
    assert ev("Item.allInstances()->isEmpty()", model, cfg) is F
    assert ev("Item.allInstances()->forAll(i | i.b > 0)", model, cfg) is T


def test_forall_with_undefined_body():
    model = parse(ITEM_MODEL)
    cfg = snapshot_config([{"a": 0, "b": 0, "c": True}])
    assert ev("Item.allInstances()->forAll(i | 1 / i.a = 1)", model, cfg) is U
    assert ev("Item.allInstances()->exists(i | 1 / i.a = 1 or true)", model, cfg) is T


def test_typecheck():
    model = parse(ITEM_MODEL)
    env = TypeEnv(model, {"self": ClassType("Item")})
    assert str(typecheck(parse_constraint("a + 1"), env)) == "Integer"
    assert str(typecheck(parse_constraint("a / 2"), env)) == "Real"
    assert str(typecheck(parse_constraint("Item.allInstances()->forAll(i | i.c)"), env)) == "Boolean"
    with pytest.raises(TypeCheckError):
        typecheck(parse_constraint("a + true"), env)
    with pytest.raises(TypeCheckError):
        typecheck(parse_constraint("nosuch > 1"), env)


def test_wellformed_reports_ill_typed_invariant():
    from amt.wellformed import check_wellformed
    bad = parse("model B { class A { attr x: Integer; inv x and true; } }")
    assert check_wellformed(bad)
    good = parse("model B { class A { attr x: Integer; inv x > 0 implies x <> 3; } }")
    assert check_wellformed(good) == []


def test_invariant_violation(bank):
    from amt.executor import instantiate
    cfg = instantiate(bank, "F1")
    cfg = cfg.with_object(cfg.obj(0).with_attr("balance", -5))
    vs = check_invariants(bank, cfg)
    assert [v.object_name for v in vs] == ["a1"]
