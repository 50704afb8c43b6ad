"""Refactoring catalog: context conditions and application with co-rewriting
of every dependent artifact (constraints, statecharts, fixtures, tests and
scenarios)."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

from amt.expr import AllInstances, Binary, CollOp, Expr, Iterate, Name, Nav, Unary, walk
from amt.model import (
    ENV, PRIMITIVES, Assign, ClassDecl, Message, Model, ObjectDiagram, Observe,
    SequenceDiagram, TestCase, flatten, lifeline_class,
)
from amt.ocl.typecheck import TypeEnv, _as_collection, infer
from amt.ocl.types import ANY, ClassType, prim
from amt.syntax.lexer import KEYWORDS
from amt.wellformed import check_wellformed

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class PullUpAttribute:
    superclass: str
    attr: str

    def spec(self) -> str:
        return f"pullUpAttribute({self.superclass},{self.attr})"


@dataclass(frozen=True)
class PullUpOperation:
    superclass: str
    op: str

    def spec(self) -> str:
        return f"pullUpOperation({self.superclass},{self.op})"


@dataclass(frozen=True)
class RenameClass:
    old: str
    new: str

    def spec(self) -> str:
        return f"renameClass({self.old},{self.new})"


@dataclass(frozen=True)
class RenameAttribute:
    cls: str
    old: str
    new: str

    def spec(self) -> str:
        return f"renameAttribute({self.cls},{self.old},{self.new})"


@dataclass(frozen=True)
class RenameOperation:
    cls: str
    old: str
    new: str

    def spec(self) -> str:
        return f"renameOperation({self.cls},{self.old},{self.new})"


Transformation = Union[PullUpAttribute, PullUpOperation, RenameClass, RenameAttribute,
                       RenameOperation]

_KINDS = {"pullUpAttribute": (PullUpAttribute, 2), "pullUpOperation": (PullUpOperation, 2),
          "renameClass": (RenameClass, 2), "renameAttribute": (RenameAttribute, 3),
          "renameOperation": (RenameOperation, 3)}
_SPEC = re.compile(r"\s*([A-Za-z]+)\s*\(([^()]*)\)\s*\Z")


def parse_transformations(text: str) -> list[Transformation]:
    """Parse ``spec[;spec...]`` such as ``renameClass(A,B); pullUpAttribute(S,x)``."""
    out = []
    for part in text.split(";"):
        if not part.strip():
            continue
        m = _SPEC.match(part)
        if m is None or m.group(1) not in _KINDS:
            raise ValueError(f"cannot parse transformation '{part.strip()}'")
        kind, arity = _KINDS[m.group(1)]
        args = [a.strip() for a in m.group(2).split(",")]
        if len(args) != arity or not all(_IDENT.match(a) for a in args):
            raise ValueError(f"{m.group(1)} takes {arity} names, got '{m.group(2)}'")
        out.append(kind(*args))
    return out


@dataclass(frozen=True)
class ConditionViolation:
    code: str
    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} {self.element}: {self.message}"


class TransformationError(Exception):
    def __init__(self, violations: list[ConditionViolation], index: Optional[int] = None):
        where = f"step {index}: " if index is not None else ""
        super().__init__(where + "; ".join(str(v) for v in violations))
        self.violations = violations
        self.index = index


# -- context conditions ----------------------------------------------------

def check_conditions(model: Model, t: Transformation) -> list[ConditionViolation]:
    """Empty iff ``t`` is applicable to ``model``."""
    if isinstance(t, (PullUpAttribute, PullUpOperation)):
        return _check_pull_up(model, t)
    if isinstance(t, RenameClass):
        return _check_rename_class(model, t)
    if isinstance(t, RenameAttribute):
        return _check_rename_member(model, t, "attribute")
    if isinstance(t, RenameOperation):
        return _check_rename_member(model, t, "operation")
    raise TypeError(f"not a transformation: {t!r}")


def _bad_name(name: str) -> bool:
    return not _IDENT.match(name) or name in KEYWORDS


def _own(c: ClassDecl, kind: str, name: str):
    items = c.attributes if kind == "attribute" else c.operations
    for it in items:
        if it.name == name:
            return it
    return None


def _check_pull_up(model: Model, t) -> list[ConditionViolation]:
    kind = "attribute" if isinstance(t, PullUpAttribute) else "operation"
    name = t.attr if kind == "attribute" else t.op
    sup = t.superclass
    v: list[ConditionViolation] = []
    if sup not in model.index.classes:
        return [ConditionViolation("E_UNKNOWN_CLASS", sup, "no such class")]
    subs = model.index.direct_subclasses(sup)
    if not subs:
        return [ConditionViolation("E_NO_SUBCLASS", sup, "has no direct subclasses")]
    eff = flatten(model, sup)
    taken = eff.attribute(name) if kind == "attribute" else eff.operation(name)
    if taken is not None or (kind == "attribute" and eff.role(name) is not None):
        v.append(ConditionViolation("E_NAME_TAKEN", f"{sup}.{name}",
                                    f"{sup} already has a member named '{name}'"))
    decls = []
    for s in subs:
        d = _own(model.index.classes[s], kind, name)
        if d is None:
            v.append(ConditionViolation("E_MISSING_MEMBER", f"{s}.{name}",
                                        f"{s} does not declare {kind} '{name}'"))
        else:
            decls.append((s, d))
    for s, d in decls[1:]:
        same = (d.type == decls[0][1].type if kind == "attribute"
                else d.signature() == decls[0][1].signature())
        if not same:
            v.append(ConditionViolation("E_SIGNATURE_MISMATCH", f"{s}.{name}",
                                        f"{kind} '{name}' differs from {decls[0][0]}.{name}"))
    return v


def _check_rename_class(model: Model, t: RenameClass) -> list[ConditionViolation]:
    v = []
    if t.old not in model.index.classes:
        v.append(ConditionViolation("E_UNKNOWN_CLASS", t.old, "no such class"))
    if _bad_name(t.new):
        v.append(ConditionViolation("E_BAD_NAME", t.new, "not a valid identifier"))
    elif t.new in model.index.classes or t.new in PRIMITIVES:
        v.append(ConditionViolation("E_NAME_TAKEN", t.new, "class name already in use"))
    elif any(t.new in (m.sender, m.receiver) for sd in model.sds for m in sd.messages):
        v.append(ConditionViolation("E_NAME_TAKEN", t.new,
                                    "name is used as a scenario lifeline"))
    return v


def _check_rename_member(model: Model, t, kind: str) -> list[ConditionViolation]:
    v = []
    if t.cls not in model.index.classes:
        return [ConditionViolation("E_UNKNOWN_CLASS", t.cls, "no such class")]
    c = model.index.classes[t.cls]
    elem = f"{t.cls}.{t.old}"
    if _own(c, kind, t.old) is None:
        v.append(ConditionViolation("E_UNKNOWN_MEMBER", elem, f"{t.cls} declares no {kind} "
                                    f"'{t.old}'"))
        return v
    if c.superclass in model.index.classes:
        parent = flatten(model, c.superclass)
        inherited = (parent.attribute(t.old) if kind == "attribute"
                     else parent.operation(t.old))
        if inherited is not None:
            v.append(ConditionViolation("E_INHERITED_MEMBER", elem,
                                        f"'{t.old}' is also declared by a superclass"))
    below = [d for d in model.index.descendants(t.cls) if d != t.cls]
    for d in below:
        if _own(model.index.classes[d], kind, t.old) is not None:
            v.append(ConditionViolation("E_REDECLARED", f"{d}.{t.old}",
                                        f"subclass {d} redeclares '{t.old}'"))
    if _bad_name(t.new):
        v.append(ConditionViolation("E_BAD_NAME", t.new, "not a valid identifier"))
        return v
    if t.new == t.old:
        v.append(ConditionViolation("E_NAME_TAKEN", f"{t.cls}.{t.new}",
                                    f"'{t.new}' is the current name"))
        return v
    for d in [t.cls] + below:
        eff = flatten(model, d)
        if kind == "attribute":
            clash = eff.attribute(t.new) is not None or eff.role(t.new) is not None
            clash = clash or any(p.name == t.new for o in eff.operations for p in o.params)
            clash = clash or any(isinstance(e, Iterate) and e.var == t.new
                                 for x in _class_exprs(model.index.classes[d])
                                 for e in walk(x))
        else:
            clash = eff.operation(t.new) is not None
        if clash:
            v.append(ConditionViolation("E_NAME_TAKEN", f"{d}.{t.new}",
                                        f"'{t.new}' is already in scope in {d}"))
            break
    return v


def _class_exprs(c: ClassDecl) -> list[Expr]:
    out = list(c.invariants)
    if c.statechart is not None:
        for tr in c.statechart.transitions:
            if tr.guard is not None:
                out.append(tr.guard)
            for a in tr.actions:
                out.extend([a.expr] if isinstance(a, Assign) else a.args)
    return out


# -- typed rewriting ---------------------------------------------------------

ExprFn = Callable[[Expr, Expr, TypeEnv], Optional[Expr]]


def rewrite_expr(e: Expr, env: TypeEnv, fn: ExprFn) -> Expr:
    """Rebuild ``e`` bottom-up. ``fn(original, rebuilt, env)`` sees the node as
    typed under the original model and may return a replacement."""
    if isinstance(e, Nav):
        new = replace(e, source=rewrite_expr(e.source, env, fn))
    elif isinstance(e, Iterate):
        ct = _as_collection(infer(e.source, env, []))
        elem = ANY if ct is ANY else ct.elem
        new = replace(e, source=rewrite_expr(e.source, env, fn),
                      body=rewrite_expr(e.body, env.bind(e.var, elem), fn))
    elif isinstance(e, Unary):
        new = replace(e, operand=rewrite_expr(e.operand, env, fn))
    elif isinstance(e, Binary):
        new = replace(e, left=rewrite_expr(e.left, env, fn),
                      right=rewrite_expr(e.right, env, fn))
    elif isinstance(e, CollOp):
        new = replace(e, source=rewrite_expr(e.source, env, fn),
                      args=tuple(rewrite_expr(a, env, fn) for a in e.args))
    else:
        new = e
    out = fn(e, new, env)
    return new if out is None else out


@dataclass
class _Rewriter:
    """Hooks for one transformation; the walk over the model is shared."""

    model: Model

    def expr(self, e: Expr, orig: Expr, env: TypeEnv) -> Optional[Expr]:
        return None

    def assign_attr(self, cls: str, attr: str) -> str:
        return attr

    def event(self, cls: str, op: str) -> str:
        return op

    def class_name(self, name: str) -> str:
        return name

    def obj_attr(self, cls: str, attr: str) -> str:
        return attr

    def classes(self, classes: tuple[ClassDecl, ...]) -> tuple[ClassDecl, ...]:
        return classes

    # -- walk --

    def run(self) -> Model:
        m = self.model
        classes = tuple(self.class_decl(c) for c in self.classes(m.classes))
        assocs = tuple(replace(a, source=self.class_name(a.source),
                               target=self.class_name(a.target)) for a in m.associations)
        fixtures = tuple(self.od(f) for f in m.fixtures)
        tests = tuple(self.test(t) for t in m.tests)
        sds = tuple(self.sd(s) for s in m.sds)
        return replace(m, classes=classes, associations=assocs, fixtures=fixtures,
                       tests=tests, sds=sds)

    def rx(self, e: Expr, env: TypeEnv) -> Expr:
        return rewrite_expr(e, env, lambda orig, new, env: self.expr(new, orig, env))

    def class_decl(self, c: ClassDecl) -> ClassDecl:
        m = self.model
        known = c.name in m.index.classes
        env = TypeEnv(m, {"self": ClassType(c.name)})
        invs = tuple(self.rx(i, env) for i in c.invariants)
        sc = c.statechart
        if sc is not None:
            eff = flatten(m, c.name) if known else None
            trs = []
            for t in sc.transitions:
                tenv = env
                op = eff.operation(t.event) if eff is not None else None
                for p in (op.params if op is not None else ()):
                    tenv = tenv.bind(p.name, prim(p.type) or ANY)
                guard = self.rx(t.guard, tenv) if t.guard is not None else None
                acts = tuple(self.action(a, c.name, tenv) for a in t.actions)
                trs.append(replace(t, event=self.event(c.name, t.event), guard=guard,
                                   actions=acts))
            sc = replace(sc, transitions=tuple(trs))
        sup = self.class_name(c.superclass) if c.superclass is not None else None
        return replace(c, name=self.class_name(c.name), superclass=sup, invariants=invs,
                       statechart=sc)

    def action(self, a, cls: str, env: TypeEnv):
        if isinstance(a, Assign):
            return replace(a, attr=self.assign_attr(cls, a.attr), expr=self.rx(a.expr, env))
        target = self.path_target(cls, a.path)
        op = self.event(target, a.op) if target is not None else a.op
        return replace(a, op=op, args=tuple(self.rx(x, env) for x in a.args))

    def path_target(self, cls: str, path: tuple[str, ...]) -> Optional[str]:
        cur = cls
        for role in path:
            r = flatten(self.model, cur).role(role)
            if r is None:
                return None
            cur = r.target
        return cur

    def od(self, od: ObjectDiagram) -> ObjectDiagram:
        objs = tuple(replace(o, cls=self.class_name(o.cls),
                             values=tuple((self.obj_attr(o.cls, k), v) for k, v in o.values))
                     for o in od.objects)
        return replace(od, objects=objs)

    def message(self, msg: Message, cls_of: Callable[[str], Optional[str]]) -> Message:
        cls = cls_of(msg.receiver)
        sender = msg.sender if msg.sender == ENV else self.lifeline(msg.sender)
        return replace(msg, sender=sender, receiver=self.lifeline(msg.receiver),
                       op=self.event(cls, msg.op) if cls is not None else msg.op)

    def lifeline(self, name: str) -> str:
        return name

    def test(self, t: TestCase) -> TestCase:
        m = self.model
        fx = m.index.fixtures.get(t.fixture)
        objs = {o.name: o.cls for o in fx.objects} if fx is not None else {}
        env = TypeEnv(m, {n: ClassType(c) for n, c in objs.items()})
        steps = []
        for s in t.steps:
            if isinstance(s, Observe):
                steps.append(replace(s, message=self.message(s.message, objs.get)))
            else:
                steps.append(replace(s, expr=self.rx(s.expr, env)))
        return replace(t, trigger=tuple(self.message(x, objs.get) for x in t.trigger),
                       steps=tuple(steps),
                       oracle=self.od(t.oracle) if t.oracle is not None else None)

    def sd(self, s: SequenceDiagram) -> SequenceDiagram:
        return replace(s, messages=tuple(
            self.message(x, lambda n: lifeline_class(self.model, n)) for x in s.messages))


def _in(model: Model, cls: Optional[str], root: str) -> bool:
    return cls is not None and cls in model.index.classes and model.index.is_subclass(cls, root)


class _RenameClass(_Rewriter):
    def __init__(self, model: Model, t: RenameClass):
        super().__init__(model)
        self.t = t

    def class_name(self, name: str) -> str:
        return self.t.new if name == self.t.old else name

    def lifeline(self, name: str) -> str:
        return self.class_name(name) if name in self.model.index.classes else name

    def expr(self, e, orig, env):
        if isinstance(e, AllInstances) and e.class_name == self.t.old:
            return replace(e, class_name=self.t.new)
        return None


class _RenameAttribute(_Rewriter):
    def __init__(self, model: Model, t: RenameAttribute):
        super().__init__(model)
        self.t = t

    def owns(self, cls: Optional[str]) -> bool:
        return _in(self.model, cls, self.t.cls)

    def expr(self, e, orig, env):
        t = self.t
        if isinstance(e, Nav) and e.feature == t.old:
            st = infer(orig.source, env, [])
            if isinstance(st, ClassType) and self.owns(st.name):
                return replace(e, feature=t.new)
        if isinstance(e, Name) and e.name == t.old and t.old not in env.vars:
            st = env.vars.get("self")
            if isinstance(st, ClassType) and self.owns(st.name):
                return replace(e, name=t.new)
        return None

    def assign_attr(self, cls: str, attr: str) -> str:
        return self.t.new if attr == self.t.old and self.owns(cls) else attr

    obj_attr = assign_attr

    def classes(self, classes):
        t = self.t
        return tuple(replace(c, attributes=tuple(replace(a, name=t.new) if a.name == t.old
                                                 else a for a in c.attributes))
                     if c.name == t.cls else c for c in classes)


class _RenameOperation(_Rewriter):
    def __init__(self, model: Model, t: RenameOperation):
        super().__init__(model)
        self.t = t

    def event(self, cls: str, op: str) -> str:
        return self.t.new if op == self.t.old and _in(self.model, cls, self.t.cls) else op

    def classes(self, classes):
        t = self.t
        return tuple(replace(c, operations=tuple(replace(o, name=t.new) if o.name == t.old
                                                 else o for o in c.operations))
                     if c.name == t.cls else c for c in classes)


class _PullUp(_Rewriter):
    def __init__(self, model: Model, t):
        super().__init__(model)
        self.t = t

    def classes(self, classes):
        t = self.t
        field_ = "attributes" if isinstance(t, PullUpAttribute) else "operations"
        name = t.attr if isinstance(t, PullUpAttribute) else t.op
        subs = set(self.model.index.direct_subclasses(t.superclass))
        moved = None
        out = []
        for c in classes:
            if c.name in subs:
                members = getattr(c, field_)
                if moved is None:
                    moved = next(x for x in members if x.name == name)
                c = replace(c, **{field_: tuple(x for x in members if x.name != name)})
            out.append(c)
        return tuple(replace(c, **{field_: getattr(c, field_) + (moved,)})
                     if c.name == t.superclass else c for c in out)


_REWRITERS = {PullUpAttribute: _PullUp, PullUpOperation: _PullUp, RenameClass: _RenameClass,
              RenameAttribute: _RenameAttribute, RenameOperation: _RenameOperation}


def apply(model: Model, t: Transformation) -> Model:
    """Apply ``t``; raises TransformationError (model untouched) when a
    context condition fails or the result would not be well-formed."""
    violations = check_conditions(model, t)
    if violations:
        raise TransformationError(violations)
    out = _REWRITERS[type(t)](model, t).run()
    diags = check_wellformed(out)
    if diags:
        raise TransformationError([ConditionViolation("E_ILLFORMED_RESULT", t.spec(), str(d))
                                   for d in diags])
    return out


def candidate_sites(model: Model, suffix: str = "2") -> list[Transformation]:
    """One instance of each catalog transformation per model element: every
    class, attribute and operation renamed to ``name + suffix``, and every
    member a superclass could receive from its direct subclasses. Callers
    filter with ``check_conditions``."""
    out: list[Transformation] = []
    pulls: set = set()
    for c in model.classes:
        out.append(RenameClass(c.name, c.name + suffix))
        out.extend(RenameAttribute(c.name, a.name, a.name + suffix) for a in c.attributes)
        out.extend(RenameOperation(c.name, o.name, o.name + suffix) for o in c.operations)
        if c.superclass is not None:
            for a in c.attributes:
                pulls.add(PullUpAttribute(c.superclass, a.name))
            for o in c.operations:
                pulls.add(PullUpOperation(c.superclass, o.name))
    out.extend(sorted(pulls, key=lambda t: t.spec()))
    return out


def applicable_sites(model: Model, suffix: str = "2") -> list[Transformation]:
    return [t for t in candidate_sites(model, suffix) if not check_conditions(model, t)]
