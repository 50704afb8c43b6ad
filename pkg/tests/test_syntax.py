from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from amt.expr import Binary, Lit, Name, Unary
from amt.syntax import (
    ParseFailure, format_expr, format_literal, parse, parse_constraint, parse_messages,
    print_model, tokenize,
)

from conftest import MODELS


def corpus():
    return sorted(MODELS.glob("*.amt"))


@pytest.mark.parametrize("path", corpus(), ids=lambda p: p.name)
def test_round_trip(path):
    text = path.read_text(encoding="utf-8")
    m = parse(text, str(path))
    printed = print_model(m)
    assert parse(printed) == m
    assert print_model(parse(printed)) == printed


def test_corpus_size():
    files = corpus()
    assert len(files) >= 20
    assert sum(p.name.startswith("adv_") for p in files) >= 3


def test_crlf_and_tabs_equal_lf():
    text = (MODELS / "adv_crlf.amt").read_bytes().decode()
    assert "\r\n" in text
    assert parse(text) == parse(text.replace("\r\n", "\n").replace("\t", " "))


@pytest.mark.parametrize("src,line,col", [
    ("model M { class A { attr x Integer; } }", 1, 28),
    ("model M { class A { } ", 1, 23),
    ("model M { class A { attr x: Integer; inv x > ; } }", 1, 46),
    ("model M {\n  clas A { }\n}", 2, 3),
])
def test_parse_error_positions(src, line, col):
    with pytest.raises(ParseFailure) as ei:
        parse(src, "m.amt")
    err = ei.value.errors[0]
    assert (err.span.line, err.span.col) == (line, col)
    assert str(err).startswith(f"m.amt:{line}:{col}:")


def test_errors_recover_and_accumulate():
    src = "model M {\n class A { attr x Integer; }\n class B { attr y Integer; }\n}"
    with pytest.raises(ParseFailure) as ei:
        parse(src)
    assert len(ei.value.errors) >= 2


def test_unterminated_string():
    assert tokenize('"abc')[0].kind == "error"
    with pytest.raises(ParseFailure):
        parse('model M { class A { attr s: String; inv s = "abc; } }')


def test_messages():
    msgs = parse_messages('a.deposit(50); env -> a.withdraw(-1); b -> c.go("x", true);')
    assert [(m.sender, m.receiver, m.op) for m in msgs] == [
        ("env", "a", "deposit"), ("env", "a", "withdraw"), ("b", "c", "go")]
    assert msgs[1].args[0].value == -1


@pytest.mark.parametrize("text", [
    "1 - (2 - 3)", "(1 - 2) - 3", "-(-3)", "not (a and b)", "a implies (b implies c)",
    "(a implies b) implies c", "x.y->forAll(z | z.w > 0)", "2 * (3 + 4) mod 5",
    "s->select(v | v <> 1)->size() = 0", "- 2.5 < 0.0", "\"q\\\"x\" = s",
])
def test_expr_round_trip(text):
    e = parse_constraint(text)
    assert parse_constraint(format_expr(e)) == e


_names = st.sampled_from(["a", "b", "c"])
_ints = st.integers(-10**6, 10**6).map(lambda v: Lit("Integer", v))
_reals = st.floats(allow_nan=False, allow_infinity=False, width=64).map(lambda v: Lit("Real", v))
_strs = st.text(alphabet=st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=6
                ).map(lambda v: Lit("String", v))
_leaf = st.one_of(_names.map(Name), _ints, _reals, _strs, st.booleans().map(lambda v: Lit("Boolean", v)))
_ops = st.sampled_from(["+", "-", "*", "/", "mod", "=", "<>", "<", "<=", "and", "or", "implies"])
exprs = st.recursive(_leaf, lambda sub: st.one_of(
    st.builds(Binary, _ops, sub, sub),
    st.builds(Unary, st.sampled_from(["not", "-"]), sub)), max_leaves=12)


@given(exprs)
def test_printer_parser_inverse(e):
    text = format_expr(e)
    back = parse_constraint(text)
    assert format_expr(back) == text
    assert parse_constraint(format_expr(back)) == back


@given(st.one_of(_ints, _reals, _strs))
def test_literal_round_trip(lit):
    back = parse_constraint(format_literal(lit))
    if isinstance(back, Unary):  # negative numbers print with a leading minus
        assert back.op == "-" and back.operand.value == -lit.value
    else:
        assert back.value == lit.value and back.kind == lit.kind
