"""Constraint expression AST (the OCL subset used by invariants, guards,
actions and test assertions).

Nodes are frozen dataclasses; structural equality ignores source spans.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Optional, Union


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"

    def sort_key(self) -> tuple[int, int]:
        return (self.line, self.col)


def _span() -> Optional[SourceSpan]:
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lit:
    """Literal. ``kind`` is the primitive type name so that ``true`` and
    ``1`` never compare equal."""

    kind: str
    value: Union[int, float, bool, str]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Name:
    """Variable reference: ``self``, a parameter, iterator, fixture object,
    or (implicitly through ``self``) an attribute or role."""

    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Nav:
    source: "Expr"
    feature: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Unary:
    op: str  # "not" | "-"
    operand: "Expr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AllInstances:
    class_name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class CollOp:
    """``source->op(args)`` for size, isEmpty, notEmpty, includes, sum."""

    source: "Expr"
    op: str
    args: tuple["Expr", ...] = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Iterate:
    """``source->op(var | body)`` for forAll, exists, select, collect."""

    source: "Expr"
    op: str
    var: str
    body: "Expr"
    span: Optional[SourceSpan] = _span()


Expr = Union[Lit, Name, Nav, Unary, Binary, AllInstances, CollOp, Iterate]

SIMPLE_COLL_OPS = {"size": 0, "isEmpty": 0, "notEmpty": 0, "includes": 1, "sum": 0}
ITERATOR_OPS = ("forAll", "exists", "select", "collect")

BOOL_OPS = ("and", "or", "implies")
COMPARE_OPS = ("=", "<>", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*", "/", "mod")

# Binding strength; larger binds tighter.
PRECEDENCE = {
    "implies": 1,
    "or": 2,
    "and": 3,
    "not": 4,
    "=": 5, "<>": 5, "<": 5, "<=": 5, ">": 5, ">=": 5,
    "+": 6, "-": 6,
    "*": 7, "/": 7, "mod": 7,
}
UNARY_MINUS_PREC = 8
POSTFIX_PREC = 9


def lit(value: Union[int, float, bool, str]) -> Lit:
    """Build a literal, inferring its primitive kind from the Python type."""
    if isinstance(value, bool):
        return Lit("Boolean", value)
    if isinstance(value, int):
        return Lit("Integer", value)
    if isinstance(value, float):
        return Lit("Real", value)
    if isinstance(value, str):
        return Lit("String", value)
    raise TypeError(f"not a primitive literal: {value!r}")


def children(e: Expr) -> Iterator[Expr]:
    if isinstance(e, Nav):
        yield e.source
    elif isinstance(e, Unary):
        yield e.operand
    elif isinstance(e, Binary):
        yield e.left
        yield e.right
    elif isinstance(e, CollOp):
        yield e.source
        yield from e.args
    elif isinstance(e, Iterate):
        yield e.source
        yield e.body


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    for c in children(e):
        yield from walk(c)


def transform(e: Expr, fn: Callable[[Expr], Optional[Expr]]) -> Expr:
    """Rebuild ``e`` bottom-up; ``fn`` may return a replacement or None."""
    if isinstance(e, Nav):
        e = replace(e, source=transform(e.source, fn))
    elif isinstance(e, Unary):
        e = replace(e, operand=transform(e.operand, fn))
    elif isinstance(e, Binary):
        e = replace(e, left=transform(e.left, fn), right=transform(e.right, fn))
    elif isinstance(e, CollOp):
        e = replace(e, source=transform(e.source, fn),
                    args=tuple(transform(a, fn) for a in e.args))
    elif isinstance(e, Iterate):
        e = replace(e, source=transform(e.source, fn), body=transform(e.body, fn))
    out = fn(e)
    return e if out is None else out


def conj(exprs: list[Expr]) -> Optional[Expr]:
    """Left-nested conjunction of ``exprs`` (None if empty)."""
    out: Optional[Expr] = None
    for e in exprs:
        out = e if out is None else Binary("and", out, e)
    return out


def transform_scoped(e: Expr, fn: Callable[[Expr, frozenset], Optional[Expr]],
                     bound: frozenset = frozenset()) -> Expr:
    """Like :func:`transform`, but ``fn`` also receives the iterator variables
    in scope at each node."""
    if isinstance(e, Nav):
        e = replace(e, source=transform_scoped(e.source, fn, bound))
    elif isinstance(e, Unary):
        e = replace(e, operand=transform_scoped(e.operand, fn, bound))
    elif isinstance(e, Binary):
        e = replace(e, left=transform_scoped(e.left, fn, bound),
                    right=transform_scoped(e.right, fn, bound))
    elif isinstance(e, CollOp):
        e = replace(e, source=transform_scoped(e.source, fn, bound),
                    args=tuple(transform_scoped(a, fn, bound) for a in e.args))
    elif isinstance(e, Iterate):
        e = replace(e, source=transform_scoped(e.source, fn, bound),
                    body=transform_scoped(e.body, fn, bound | {e.var}))
    out = fn(e, bound)
    return e if out is None else out
