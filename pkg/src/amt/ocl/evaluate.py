"""Evaluation of constraint expressions over a configuration.

``and``/``or``/``not``/``implies`` follow three-valued Kleene logic; every
other operator is strict in Undefined. Evaluation never raises on absent
navigation, division by zero or integer overflow: those yield Undefined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from amt.config import Configuration
from amt.expr import AllInstances, Binary, CollOp, Expr, Iterate, Lit, Name, Nav, Unary
from amt.model import MANY, Model, flatten
from amt.ocl.values import UNDEFINED, ObjRef, SeqV, SetV, int_ok


@dataclass(frozen=True)
class EvalContext:
    model: Model
    config: Configuration
    bindings: Mapping[str, Any] = field(default_factory=dict)

    def bind(self, name: str, value: Any) -> "EvalContext":
        return EvalContext(self.model, self.config, {**self.bindings, name: value})


def eval_expr(expr: Expr, ctx: EvalContext) -> Any:
    return _Evaluator(ctx.model, ctx.config).eval(expr, ctx.bindings)


def object_bindings(config: Configuration) -> dict[str, ObjRef]:
    """Bind every object name of a configuration (used for test assertions)."""
    return {o.name: ObjRef(o.oid) for o in config.objects}


class _Evaluator:
    def __init__(self, model: Model, config: Configuration):
        self.model = model
        self.config = config

    def feature(self, ref: Any, name: str) -> Any:
        if not isinstance(ref, ObjRef):
            return UNDEFINED
        o = self.config.obj(ref.oid)
        if o.has(name):
            return o.get(name)
        r = flatten(self.model, o.cls).role(name)
        if r is None:
            return UNDEFINED
        targets = self.config.targets(o.oid, r.name)
        if r.multiplicity == MANY:
            return SetV(tuple(ObjRef(t) for t in sorted(set(targets))))
        return ObjRef(targets[0]) if targets else UNDEFINED

    def name(self, n: str, env: Mapping[str, Any]) -> Any:
        if n in env:
            return env[n]
        return self.feature(env.get("self"), n)

    def collection(self, e: Expr, env: Mapping[str, Any]) -> Any:
        """Evaluate a ``->`` source; a single value is viewed as a one-element
        set, and an absent optional link as the empty set."""
        base: Any = None
        feat: Optional[str] = None
        if isinstance(e, Nav):
            base, feat = self.eval(e.source, env), e.feature
        elif isinstance(e, Name) and e.name not in env:
            base, feat = env.get("self"), e.name
        if feat is not None:
            v = self.feature(base, feat)
            if v is UNDEFINED and isinstance(base, ObjRef):
                o = self.config.obj(base.oid)
                if not o.has(feat) and flatten(self.model, o.cls).role(feat) is not None:
                    return SetV(())
        else:
            v = self.eval(e, env)
        if v is UNDEFINED or isinstance(v, (SetV, SeqV)):
            return v
        return SetV((v,))

    def eval(self, e: Expr, env: Mapping[str, Any]) -> Any:
        if isinstance(e, Lit):
            if e.kind == "Integer" and not int_ok(e.value):
                return UNDEFINED
            return e.value
        if isinstance(e, Name):
            return self.name(e.name, env)
        if isinstance(e, Nav):
            return self.feature(self.eval(e.source, env), e.feature)
        if isinstance(e, Binary):
            return self.binary(e, env)
        if isinstance(e, Unary):
            v = self.eval(e.operand, env)
            if v is UNDEFINED:
                return UNDEFINED
            if e.op == "not":
                return not v
            return _num(-v)
        if isinstance(e, AllInstances):
            idx = self.model.index
            return SetV(tuple(ObjRef(o.oid) for o in self.config.objects
                              if idx.is_subclass(o.cls, e.class_name)))
        if isinstance(e, CollOp):
            return self.coll_op(e, env)
        if isinstance(e, Iterate):
            return self.iterate(e, env)
        raise TypeError(f"not an expression: {e!r}")

    def binary(self, e: Binary, env: Mapping[str, Any]) -> Any:
        op = e.op
        left = self.eval(e.left, env)
        if op == "and":
            if left is False:
                return False
            right = self.eval(e.right, env)
            if right is False:
                return False
            return True if (left is True and right is True) else UNDEFINED
        if op == "or":
            if left is True:
                return True
            right = self.eval(e.right, env)
            if right is True:
                return True
            return False if (left is False and right is False) else UNDEFINED
        if op == "implies":
            if left is False:
                return True
            right = self.eval(e.right, env)
            if right is True:
                return True
            return False if (left is True and right is False) else UNDEFINED
        right = self.eval(e.right, env)
        if left is UNDEFINED or right is UNDEFINED:
            return UNDEFINED
        if op == "=":
            return values_equal(left, right)
        if op == "<>":
            return not values_equal(left, right)
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        if op == "+":
            return _num(left + right)
        if op == "-":
            return _num(left - right)
        if op == "*":
            return _num(left * right)
        if op == "/":
            if right == 0:
                return UNDEFINED
            return _num(left / right)
        if op == "mod":
            if right == 0:
                return UNDEFINED
            # truncated remainder: sign follows the dividend
            r = abs(left) % abs(right)
            return _num(-r if left < 0 else r)
        raise ValueError(f"unknown operator {op!r}")

    def coll_op(self, e: CollOp, env: Mapping[str, Any]) -> Any:
        src = self.collection(e.source, env)
        if src is UNDEFINED:
            return UNDEFINED
        items = src.items
        if e.op == "size":
            return len(items)
        if e.op == "isEmpty":
            return not items
        if e.op == "notEmpty":
            return bool(items)
        if e.op == "includes":
            x = self.eval(e.args[0], env)
            if x is UNDEFINED:
                return UNDEFINED
            return any(values_equal(x, it) for it in items)
        if e.op == "sum":
            total: Any = 0
            for it in items:
                total = total + it
            return _num(total)
        raise ValueError(f"unknown collection operation {e.op!r}")

    def iterate(self, e: Iterate, env: Mapping[str, Any]) -> Any:
        src = self.collection(e.source, env)
        if src is UNDEFINED:
            return UNDEFINED
        results = []
        for it in src.items:
            inner = dict(env)
            inner[e.var] = it
            results.append((it, self.eval(e.body, inner)))
        if e.op == "forAll":
            if any(r is False for _, r in results):
                return False
            return True if all(r is True for _, r in results) else UNDEFINED
        if e.op == "exists":
            if any(r is True for _, r in results):
                return True
            return False if all(r is False for _, r in results) else UNDEFINED
        if e.op == "select":
            # Undefined predicate results drop the element
            kept = tuple(it for it, r in results if r is True)
            return SetV(kept) if isinstance(src, SetV) else SeqV(kept)
        if e.op == "collect":
            out: list[Any] = []
            for _, r in results:
                if r is UNDEFINED:
                    return UNDEFINED
                if isinstance(r, (SetV, SeqV)):
                    out.extend(r.items)
                else:
                    out.append(r)
            return SeqV(tuple(out))
        raise ValueError(f"unknown iterator {e.op!r}")


def _num(v: Any) -> Any:
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v if int_ok(v) else UNDEFINED
    if isinstance(v, float) and not math.isfinite(v):
        return UNDEFINED
    return v


def values_equal(a: Any, b: Any) -> bool:
    if isinstance(a, SetV) or isinstance(b, SetV):
        return isinstance(a, SetV) and isinstance(b, SetV) and a == b
    if isinstance(a, SeqV) or isinstance(b, SeqV):
        return (isinstance(a, SeqV) and isinstance(b, SeqV) and len(a.items) == len(b.items)
                and all(values_equal(x, y) for x, y in zip(a.items, b.items)))
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b

