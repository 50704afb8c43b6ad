"""Static typing of constraint expressions.

A bare name that is not bound in the environment resolves, when ``self`` is
bound to an object type, to an attribute or role of ``self``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from amt.expr import (
    AllInstances, Binary, CollOp, Expr, Iterate, Lit, Name, Nav, SourceSpan, Unary,
)
from amt.model import MANY, Diagnostic, Model, flatten
from amt.ocl.types import (
    ANY, BOOLEAN, INTEGER, REAL, ClassType, CollType, Type, comparable, conforms,
    is_numeric, prim,
)


class TypeCheckError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class TypeEnv:
    model: Model
    vars: Mapping[str, Type] = field(default_factory=dict)

    def bind(self, name: str, t: Type) -> "TypeEnv":
        return TypeEnv(self.model, {**self.vars, name: t})


def feature_type(model: Model, cls: str, feature: str) -> Optional[Type]:
    eff = flatten(model, cls)
    a = eff.attribute(feature)
    if a is not None:
        return prim(a.type) or ANY
    r = eff.role(feature)
    if r is not None:
        t = ClassType(r.target)
        return CollType("Set", t) if r.multiplicity == MANY else t
    return None


def resolve_name(env: TypeEnv, name: str) -> Optional[Type]:
    if name in env.vars:
        return env.vars[name]
    self_t = env.vars.get("self")
    if isinstance(self_t, ClassType) and self_t.name in env.model.index.classes:
        return feature_type(env.model, self_t.name, name)
    return None


def typecheck(expr: Expr, env: TypeEnv) -> Type:
    """Type of ``expr``; raises TypeCheckError listing every problem."""
    diags: list[Diagnostic] = []
    t = infer(expr, env, diags)
    if diags:
        raise TypeCheckError(diags)
    return t


def check_boolean(expr: Expr, env: TypeEnv, diags: list[Diagnostic], what: str) -> None:
    t = infer(expr, env, diags)
    if not conforms(env.model, t, BOOLEAN):
        diags.append(Diagnostic("E_TYPE", f"{what} must be Boolean, found {t}", expr.span))


def infer(e: Expr, env: TypeEnv, diags: list[Diagnostic]) -> Type:
    model = env.model

    def err(code: str, msg: str, span: Optional[SourceSpan] = None) -> Type:
        diags.append(Diagnostic(code, msg, span if span is not None else e.span))
        return ANY

    if isinstance(e, Lit):
        return prim(e.kind) or ANY
    if isinstance(e, Name):
        t = resolve_name(env, e.name)
        return t if t is not None else err("E_UNBOUND", f"unbound name '{e.name}'")
    if isinstance(e, AllInstances):
        if e.class_name not in model.index.classes:
            return err("E_UNBOUND", f"unknown class '{e.class_name}'")
        return CollType("Set", ClassType(e.class_name))
    if isinstance(e, Nav):
        st = infer(e.source, env, diags)
        if st is ANY:
            return ANY
        if not isinstance(st, ClassType):
            return err("E_TYPE", f"cannot navigate '.{e.feature}' from {st}")
        t = feature_type(model, st.name, e.feature)
        if t is None:
            return err("E_UNBOUND", f"class {st.name} has no attribute or role '{e.feature}'")
        return t
    if isinstance(e, Unary):
        t = infer(e.operand, env, diags)
        if e.op == "not":
            if not conforms(model, t, BOOLEAN):
                err("E_TYPE", f"'not' needs Boolean, found {t}")
            return BOOLEAN
        if not is_numeric(t):
            return err("E_TYPE", f"unary '-' needs a number, found {t}")
        return t
    if isinstance(e, Binary):
        lt = infer(e.left, env, diags)
        rt = infer(e.right, env, diags)
        op = e.op
        if op in ("and", "or", "implies"):
            for side, t in ((e.left, lt), (e.right, rt)):
                if not conforms(model, t, BOOLEAN):
                    err("E_TYPE", f"'{op}' needs Boolean operands, found {t}", side.span)
            return BOOLEAN
        if op in ("=", "<>"):
            if not (comparable(model, lt, rt) or (is_numeric(lt) and is_numeric(rt))):
                err("E_TYPE", f"cannot compare {lt} with {rt}")
            return BOOLEAN
        if op in ("<", "<=", ">", ">="):
            ok = (is_numeric(lt) and is_numeric(rt)) or (
                conforms(model, lt, prim("String")) and conforms(model, rt, prim("String")))
            if not ok:
                err("E_TYPE", f"'{op}' needs two numbers or two strings, found {lt} and {rt}")
            return BOOLEAN
        if op == "mod":
            for side, t in ((e.left, lt), (e.right, rt)):
                if not conforms(model, t, INTEGER):
                    err("E_TYPE", f"'mod' needs Integer operands, found {t}", side.span)
            return INTEGER
        # + - * /
        for side, t in ((e.left, lt), (e.right, rt)):
            if not is_numeric(t):
                err("E_TYPE", f"'{op}' needs numeric operands, found {t}", side.span)
        if op == "/":
            return REAL
        if lt is ANY or rt is ANY:
            return ANY
        return INTEGER if (lt == INTEGER and rt == INTEGER) else REAL
    if isinstance(e, CollOp):
        ct = _as_collection(infer(e.source, env, diags))
        if ct is ANY:
            for a in e.args:
                infer(a, env, diags)
            return INTEGER if e.op == "size" else (BOOLEAN if e.op != "sum" else ANY)
        if e.op == "size":
            return INTEGER
        if e.op in ("isEmpty", "notEmpty"):
            return BOOLEAN
        if e.op == "includes":
            at = infer(e.args[0], env, diags)
            if not (comparable(model, at, ct.elem) or (is_numeric(at) and is_numeric(ct.elem))):
                err("E_TYPE", f"includes: {at} is not comparable with {ct.elem}")
            return BOOLEAN
        if e.op == "sum":
            if not is_numeric(ct.elem):
                return err("E_TYPE", f"sum needs numeric elements, found {ct.elem}")
            return ct.elem
        return err("E_TYPE", f"unknown collection operation '{e.op}'")
    if isinstance(e, Iterate):
        ct = _as_collection(infer(e.source, env, diags))
        elem = ANY if ct is ANY else ct.elem
        bt = infer(e.body, env.bind(e.var, elem), diags)
        if e.op in ("forAll", "exists", "select"):
            if not conforms(model, bt, BOOLEAN):
                err("E_TYPE", f"{e.op} body must be Boolean, found {bt}", e.body.span)
            if e.op == "select":
                return ANY if ct is ANY else ct
            return BOOLEAN
        if e.op == "collect":
            if isinstance(bt, CollType):
                bt = bt.elem
            return CollType("Sequence", bt)
        return err("E_TYPE", f"unknown iterator '{e.op}'")
    raise TypeError(f"not an expression: {e!r}")


def _as_collection(t: Type):
    if t is ANY or isinstance(t, CollType):
        return t
    return CollType("Set", t)
