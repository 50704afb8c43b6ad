"""Structural and typing rules of a model. Diagnostics are returned, never
raised, and come out in document order."""

from __future__ import annotations

from typing import Iterable, Optional

from amt.expr import Lit, SourceSpan
from amt.model import (
    ENV, MANY, OPTIONAL, PRIMITIVES, Assert, Assign, ClassDecl, Diagnostic, Message,
    Model, ObjectDiagram, Observe, Send, flatten, lifeline_class,
)
from amt.ocl.typecheck import TypeEnv, check_boolean, infer
from amt.ocl.types import ANY, ClassType, Type, conforms, prim


def check_wellformed(model: Model) -> list[Diagnostic]:
    return _Checker(model).run()


def literal_conforms(lit: Lit, type_name: str) -> bool:
    return lit.kind == type_name or (lit.kind == "Integer" and type_name == "Real")


class _Checker:
    def __init__(self, model: Model):
        self.m = model
        self.diags: list[Diagnostic] = []
        self.cyclic: set[str] = set()

    def add(self, code: str, msg: str, span: Optional[SourceSpan]) -> None:
        self.diags.append(Diagnostic(code, msg, span))

    def run(self) -> list[Diagnostic]:
        m = self.m
        for kind, items in (("class", m.classes), ("association", m.associations),
                            ("fixture", m.fixtures), ("test", m.tests),
                            ("sequence diagram", m.sds)):
            self.unique(items, f"duplicate {kind}", "E_DUP_NAME")
        self.inheritance()
        for c in m.classes:
            self.class_decl(c)
        self.associations()
        for f in m.fixtures:
            self.object_diagram(f, fixture_names=None)
        for t in m.tests:
            self.test(t)
        for s in m.sds:
            objs = {}
            for msg in s.messages:
                for who in (msg.sender, msg.receiver):
                    if who != ENV and who not in objs:
                        cls = lifeline_class(m, who)
                        if cls is None:
                            self.add("E_UNKNOWN_OBJECT", f"lifeline '{who}' is neither a "
                                     "class nor a fixture object", msg.span)
                        objs[who] = cls
            for msg in s.messages:
                self.message(msg, objs)
        files = list(m.files)

        def key(d: Diagnostic):
            if d.span is None:
                return (len(files), 0, 0)
            fi = files.index(d.span.file) if d.span.file in files else len(files)
            return (fi, d.span.line, d.span.col)

        return sorted(self.diags, key=key)

    def unique(self, items: Iterable, msg: str, code: str) -> set:
        seen: set = set()
        for it in items:
            if it.name in seen:
                self.add(code, f"{msg} '{it.name}'", it.span)
            seen.add(it.name)
        return seen

    # -- classes ----------------------------------------------------------

    def inheritance(self) -> None:
        classes = self.m.index.classes
        reported: set[str] = set()
        for c in self.m.classes:
            if c.name in PRIMITIVES:
                self.add("E_DUP_NAME", f"class name '{c.name}' is a primitive type", c.span)
            if c.superclass is None:
                continue
            if c.superclass not in classes:
                self.add("E_UNKNOWN_CLASS", f"unknown superclass '{c.superclass}'", c.span)
                continue
            path = [c.name]
            cur = classes[c.name].superclass
            while cur is not None and cur in classes and cur not in path:
                path.append(cur)
                cur = classes[cur].superclass
            if cur is not None and cur in path:
                cycle = path[path.index(cur):]
                self.cyclic.update(cycle)
                if not reported.intersection(cycle):
                    reported.update(cycle)
                    self.add("E_INHERIT_CYCLE", "inheritance cycle " +
                             " -> ".join(cycle + [cycle[0]]), c.span)

    def class_decl(self, c: ClassDecl) -> None:
        m = self.m
        if m.index.classes.get(c.name) is not c or c.name in self.cyclic:
            return
        parent_scope = (flatten(m, c.superclass)
                        if c.superclass in m.index.classes and c.superclass not in self.cyclic
                        else None)
        seen: set[str] = set()
        for a in c.attributes:
            if a.type not in PRIMITIVES:
                self.add("E_UNKNOWN_TYPE", f"unknown type '{a.type}'", a.span)
            if a.name in seen:
                self.add("E_DUP_MEMBER", f"duplicate attribute '{a.name}'", a.span)
            seen.add(a.name)
            inherited = parent_scope.attribute(a.name) if parent_scope else None
            if inherited is not None and inherited.type != a.type:
                self.add("E_REDECLARED", f"attribute '{a.name}' redeclared with type "
                         f"{a.type} (inherited {inherited.type})", a.span)
        seen = set()
        for o in c.operations:
            pseen: set[str] = set()
            for p in o.params:
                if p.type not in PRIMITIVES:
                    self.add("E_UNKNOWN_TYPE", f"unknown type '{p.type}'", p.span)
                if p.name in pseen or p.name == "self":
                    self.add("E_DUP_MEMBER", f"duplicate parameter '{p.name}'", p.span)
                pseen.add(p.name)
            if o.name in seen:
                self.add("E_DUP_MEMBER", f"duplicate operation '{o.name}'", o.span)
            seen.add(o.name)
            inherited = parent_scope.operation(o.name) if parent_scope else None
            if inherited is not None and inherited.signature() != o.signature():
                self.add("E_REDECLARED", f"operation '{o.name}' redeclared with a "
                         "different signature", o.span)
        eff = flatten(m, c.name)
        env = TypeEnv(m, {"self": ClassType(c.name)})
        for inv in c.invariants:
            check_boolean(inv, env, self.diags, "invariant")
        sc = c.statechart
        if sc is None:
            return
        states: set[str] = set()
        for s in sc.states:
            if s in states:
                self.add("E_DUP_STATE", f"duplicate state '{s}'", sc.span)
            states.add(s)
        if sc.initial not in states:
            self.add("E_UNKNOWN_STATE", f"initial state '{sc.initial}' is not declared",
                     sc.span)
        for t in sc.transitions:
            for s in (t.source, t.target):
                if s not in states:
                    self.add("E_UNKNOWN_STATE", f"unknown state '{s}'", t.span)
            op = eff.operation(t.event)
            if op is None:
                self.add("E_UNKNOWN_EVENT", f"'{t.event}' is not an operation of {c.name}",
                         t.span)
                continue
            tenv = env
            for p in op.params:
                tenv = tenv.bind(p.name, prim(p.type) or ClassType(p.type))
            if t.guard is not None:
                check_boolean(t.guard, tenv, self.diags, "guard")
            for a in t.actions:
                self.action(a, c.name, tenv)

    def action(self, a, cls: str, env: TypeEnv) -> None:
        m = self.m
        if isinstance(a, Assign):
            attr = flatten(m, cls).attribute(a.attr)
            rt = infer(a.expr, env, self.diags)
            if attr is None:
                self.add("E_UNBOUND", f"{cls} has no attribute '{a.attr}'", a.span)
            elif not conforms(m, rt, prim(attr.type) or ANY):
                self.add("E_TYPE", f"cannot assign {rt} to {a.attr}: {attr.type}", a.span)
            return
        assert isinstance(a, Send)
        cur = cls
        for role in a.path:
            r = flatten(m, cur).role(role)
            if r is None:
                self.add("E_UNBOUND", f"{cur} has no role '{role}'", a.span)
                return
            cur = r.target
        op = flatten(m, cur).operation(a.op) if cur in m.index.classes else None
        if op is None:
            self.add("E_UNKNOWN_EVENT", f"'{a.op}' is not an operation of {cur}", a.span)
            return
        if len(op.params) != len(a.args):
            self.add("E_ARITY", f"{a.op} expects {len(op.params)} argument(s)", a.span)
            return
        for p, arg in zip(op.params, a.args):
            at = infer(arg, env, self.diags)
            if not conforms(m, at, prim(p.type) or ANY):
                self.add("E_TYPE", f"argument '{p.name}' expects {p.type}, found {at}",
                         arg.span or a.span)

    def associations(self) -> None:
        m = self.m
        for a in m.associations:
            for end in (a.source, a.target):
                if end not in m.index.classes:
                    self.add("E_UNKNOWN_CLASS", f"unknown class '{end}'", a.span)
            if a.multiplicity not in (OPTIONAL, MANY):
                self.add("E_TYPE", f"bad multiplicity '{a.multiplicity}'", a.span)
        reported: set[str] = set()
        for c in m.classes:
            if c.name in self.cyclic or m.index.classes.get(c.name) is not c:
                continue
            eff = flatten(m, c.name)
            names = {x.name for x in eff.attributes}
            for r in eff.roles:
                if r.name in reported:
                    continue
                if r.role in names:
                    reported.add(r.name)
                    self.add("E_DUP_MEMBER", f"role '{r.role}' clashes with a member of "
                             f"{c.name}", r.span)
                names.add(r.role)

    # -- object diagrams, tests, scenarios --------------------------------

    def object_diagram(self, od: ObjectDiagram, fixture_names: Optional[dict[str, str]]):
        """Check a fixture (``fixture_names`` None) or an oracle pattern."""
        m = self.m
        names: dict[str, str] = {}
        for o in od.objects:
            if o.name in names:
                self.add("E_DUP_OBJECT", f"duplicate object '{o.name}'", o.span)
            if o.name == ENV:
                self.add("E_DUP_OBJECT", "'env' is reserved", o.span)
            names.setdefault(o.name, o.cls)
            if o.cls not in m.index.classes or o.cls in self.cyclic:
                self.add("E_UNKNOWN_CLASS", f"unknown class '{o.cls}'", o.span)
                continue
            eff = flatten(m, o.cls)
            vseen: set[str] = set()
            for attr, val in o.values:
                a = eff.attribute(attr)
                if a is None:
                    self.add("E_UNKNOWN_ATTR", f"{o.cls} has no attribute '{attr}'",
                             val.span or o.span)
                elif not literal_conforms(val, a.type):
                    self.add("E_TYPE", f"{attr} expects {a.type}, found {val.kind}",
                             val.span or o.span)
                if attr in vseen:
                    self.add("E_DUP_MEMBER", f"attribute '{attr}' set twice", o.span)
                vseen.add(attr)
            if o.state is not None:
                if eff.statechart is None:
                    self.add("E_NO_STATECHART", f"{o.cls} has no statechart", o.span)
                elif o.state not in eff.statechart.states:
                    self.add("E_UNKNOWN_STATE", f"unknown state '{o.state}'", o.span)
        seen_links: set = set()
        for lk in od.links:
            a = m.index.assocs.get(lk.assoc)
            if a is None:
                self.add("E_UNKNOWN_ASSOC", f"unknown association '{lk.assoc}'", lk.span)
                continue
            ok = True
            for end, want in ((lk.source, a.source), (lk.target, a.target)):
                if end not in names:
                    self.add("E_UNKNOWN_OBJECT", f"unknown object '{end}'", lk.span)
                    ok = False
                elif (names[end] in m.index.classes
                      and not m.index.is_subclass(names[end], want)):
                    self.add("E_LINK_CONFORM", f"'{end}' is not a {want}", lk.span)
                    ok = False
            key = (lk.assoc, lk.source, lk.target)
            if key in seen_links:
                self.add("E_DUP_LINK", "duplicate link", lk.span)
            elif ok and a.multiplicity == OPTIONAL and any(
                    k[0] == lk.assoc and k[1] == lk.source for k in seen_links):
                self.add("E_MULTIPLICITY", f"'{lk.source}' already has a '{a.role}' link",
                         lk.span)
            seen_links.add(key)
        return names

    def test(self, t) -> None:
        m = self.m
        if not t.trigger:
            self.add("E_EMPTY_TRIGGER", "a test needs at least one trigger message", t.span)
        fx = m.index.fixtures.get(t.fixture)
        if fx is None:
            self.add("E_UNKNOWN_FIXTURE", f"unknown fixture '{t.fixture}'", t.span)
            return
        objs = {o.name: o.cls for o in fx.objects}
        for msg in t.trigger:
            self.message(msg, objs)
        vars: dict[str, Type] = {n: ClassType(c) for n, c in objs.items()
                                 if c in m.index.classes}
        env = TypeEnv(m, vars)
        for st in t.steps:
            if isinstance(st, Observe):
                self.message(st.message, objs)
            elif isinstance(st, Assert):
                check_boolean(st.expr, env, self.diags, "assertion")
        if t.oracle is not None:
            self.object_diagram(t.oracle, objs)

    def message(self, msg: Message, objs: dict[str, Optional[str]]) -> None:
        m = self.m
        senders = () if msg.sender == ENV else (msg.sender,)
        for who in senders + (msg.receiver,):
            if who not in objs:
                self.add("E_UNKNOWN_OBJECT", f"unknown object '{who}'", msg.span)
                return
        cls = objs[msg.receiver]
        if cls is None or cls not in m.index.classes or cls in self.cyclic:
            return
        op = flatten(m, cls).operation(msg.op)
        if op is None:
            self.add("E_UNKNOWN_EVENT", f"'{msg.op}' is not an operation of {cls}", msg.span)
            return
        if len(op.params) != len(msg.args):
            self.add("E_ARITY", f"{msg.op} expects {len(op.params)} argument(s)", msg.span)
            return
        for p, arg in zip(op.params, msg.args):
            if not literal_conforms(arg, p.type):
                self.add("E_TYPE", f"argument '{p.name}' expects {p.type}, found {arg.kind}",
                         arg.span or msg.span)


def lint(model: Model) -> list[Diagnostic]:
    """Warnings that do not make a model ill-formed. ``W_NONDET``: a
    transition can never fire because an earlier one with the same source and
    event is unguarded or carries the identical guard."""
    out = []
    for c in model.classes:
        sc = c.statechart
        if sc is None:
            continue
        for i, t in enumerate(sc.transitions):
            for earlier in sc.transitions[:i]:
                if (earlier.source, earlier.event) != (t.source, t.event):
                    continue
                if earlier.guard is None or earlier.guard == t.guard:
                    out.append(Diagnostic(
                        "W_NONDET", f"transition on '{t.event}' from {t.source} overlaps an "
                        "earlier one and is shadowed by declaration order", t.span, "warning"))
                    break
    return out
