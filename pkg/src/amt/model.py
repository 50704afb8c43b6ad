"""In-memory requirements model: classes, associations, statecharts, object
diagrams, tests and scenario sequence diagrams."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

from amt.expr import Expr, Lit, SourceSpan

PRIMITIVES = ("Integer", "Real", "Boolean", "String")
STEREOTYPES = ("requirement", "auxiliary", "none")
OPTIONAL = "0..1"
MANY = "*"


def _span() -> Optional[SourceSpan]:
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Optional[SourceSpan] = None
    severity: str = "error"

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.code} {self.message}"


class ModelError(Exception):
    """Raised by model queries given a name that does not exist."""

    def __init__(self, code: str, message: str, span: Optional[SourceSpan] = None):
        super().__init__(f"{code} {message}")
        self.code = code
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Attribute:
    name: str
    type: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Param:
    name: str
    type: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Operation:
    name: str
    params: tuple[Param, ...] = ()
    span: Optional[SourceSpan] = _span()

    def signature(self) -> tuple:
        return (self.name, tuple((p.name, p.type) for p in self.params))


@dataclass(frozen=True)
class Assign:
    attr: str
    expr: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Send:
    """Send ``op(args)`` to every object reached from self along ``path``
    (a sequence of role names; empty means self)."""

    path: tuple[str, ...]
    op: str
    args: tuple[Expr, ...] = ()
    span: Optional[SourceSpan] = _span()


Action = Union[Assign, Send]


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    event: str
    guard: Optional[Expr] = None
    actions: tuple[Action, ...] = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Statechart:
    states: tuple[str, ...]
    initial: str
    transitions: tuple[Transition, ...] = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ClassDecl:
    name: str
    stereotype: str = "none"
    superclass: Optional[str] = None
    attributes: tuple[Attribute, ...] = ()
    operations: tuple[Operation, ...] = ()
    invariants: tuple[Expr, ...] = ()
    statechart: Optional[Statechart] = None
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AssocDecl:
    name: str
    source: str
    target: str
    multiplicity: str  # OPTIONAL or MANY
    role: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ObjDecl:
    name: str
    cls: str
    values: tuple[tuple[str, Lit], ...] = ()
    state: Optional[str] = None
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class LinkDecl:
    assoc: str
    source: str
    target: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ObjectDiagram:
    name: str
    objects: tuple[ObjDecl, ...] = ()
    links: tuple[LinkDecl, ...] = ()
    span: Optional[SourceSpan] = _span()

    def object(self, name: str) -> Optional[ObjDecl]:
        for o in self.objects:
            if o.name == name:
                return o
        return None


ENV = "env"


@dataclass(frozen=True)
class Message:
    sender: str  # ENV or an object/lifeline name
    receiver: str
    op: str
    args: tuple[Lit, ...] = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Observe:
    message: Message
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Assert:
    expr: Expr
    span: Optional[SourceSpan] = _span()


Step = Union[Observe, Assert]


@dataclass(frozen=True)
class TestCase:
    name: str
    fixture: str
    trigger: tuple[Message, ...]
    steps: tuple[Step, ...] = ()
    oracle: Optional[ObjectDiagram] = None
    span: Optional[SourceSpan] = _span()

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class SequenceDiagram:
    name: str
    messages: tuple[Message, ...] = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Model:
    name: str
    classes: tuple[ClassDecl, ...] = ()
    associations: tuple[AssocDecl, ...] = ()
    fixtures: tuple[ObjectDiagram, ...] = ()
    tests: tuple[TestCase, ...] = ()
    sds: tuple[SequenceDiagram, ...] = ()
    span: Optional[SourceSpan] = _span()
    files: tuple[str, ...] = field(default=(), compare=False, repr=False)

    @cached_property
    def index(self) -> "ModelIndex":
        return ModelIndex(self)

    def cls(self, name: str) -> ClassDecl:
        c = self.index.classes.get(name)
        if c is None:
            raise ModelError("E_UNKNOWN_CLASS", f"unknown class '{name}'")
        return c

    def fixture(self, name: str) -> ObjectDiagram:
        f = self.index.fixtures.get(name)
        if f is None:
            raise ModelError("E_UNKNOWN_FIXTURE", f"unknown fixture '{name}'")
        return f

    def test(self, name: str) -> TestCase:
        t = self.index.tests.get(name)
        if t is None:
            raise ModelError("E_UNKNOWN_TEST", f"unknown test '{name}'")
        return t

    def sd(self, name: str) -> SequenceDiagram:
        s = self.index.sds.get(name)
        if s is None:
            raise ModelError("E_UNKNOWN_SD", f"unknown sequence diagram '{name}'")
        return s


def merge(models: list[Model]) -> Model:
    """Merge several parsed files into one namespace (name of the first)."""
    if not models:
        raise ValueError("nothing to merge")
    files: list[str] = []
    for m in models:
        files.extend(f for f in m.files if f not in files)
    return Model(
        name=models[0].name,
        classes=tuple(c for m in models for c in m.classes),
        associations=tuple(a for m in models for a in m.associations),
        fixtures=tuple(f for m in models for f in m.fixtures),
        tests=tuple(t for m in models for t in m.tests),
        sds=tuple(s for m in models for s in m.sds),
        span=models[0].span,
        files=tuple(files),
    )


@dataclass(frozen=True)
class EffectiveClass:
    """A class with its inherited members merged in, supertype first."""

    name: str
    stereotype: str
    ancestors: tuple[str, ...]  # root first, ending with ``name``
    attributes: tuple[Attribute, ...]
    operations: tuple[Operation, ...]
    invariants: tuple[Expr, ...]
    statechart: Optional[Statechart]
    statechart_owner: Optional[str]
    roles: tuple[AssocDecl, ...]

    def attribute(self, name: str) -> Optional[Attribute]:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def operation(self, name: str) -> Optional[Operation]:
        for o in self.operations:
            if o.name == name:
                return o
        return None

    def role(self, name: str) -> Optional[AssocDecl]:
        for r in self.roles:
            if r.role == name:
                return r
        return None


def ancestry(model: Model, name: str) -> list[str]:
    """``name`` and its superclasses, root first. Stops at a cycle or at an
    undeclared superclass."""
    chain: list[str] = []
    cur: Optional[str] = name
    classes = model.index.classes
    while cur is not None and cur in classes and cur not in chain:
        chain.append(cur)
        cur = classes[cur].superclass
    chain.reverse()
    return chain


def flatten(model: Model, name: str) -> EffectiveClass:
    if name not in model.index.classes:
        raise ModelError("E_UNKNOWN_CLASS", f"unknown class '{name}'")
    cached = model.index.flat.get(name)
    if cached is not None:
        return cached
    chain = ancestry(model, name)
    attrs: list[Attribute] = []
    ops: list[Operation] = []
    invs: list[Expr] = []
    seen_attrs: set[str] = set()
    seen_ops: set[str] = set()
    sc: Optional[Statechart] = None
    sc_owner: Optional[str] = None
    for cname in chain:
        c = model.index.classes[cname]
        for a in c.attributes:
            if a.name not in seen_attrs:
                seen_attrs.add(a.name)
                attrs.append(a)
        for o in c.operations:
            if o.name not in seen_ops:
                seen_ops.add(o.name)
                ops.append(o)
        invs.extend(c.invariants)
        if c.statechart is not None:
            sc, sc_owner = c.statechart, cname
    roles = tuple(a for a in model.associations if a.source in chain)
    roles = tuple(sorted(roles, key=lambda a: chain.index(a.source)))
    own = model.index.classes[name]
    eff = EffectiveClass(name, own.stereotype, tuple(chain), tuple(attrs), tuple(ops),
                         tuple(invs), sc, sc_owner, roles)
    model.index.flat[name] = eff
    return eff


class ModelIndex:
    """Name lookups and derived relations for a model (built lazily, once)."""

    def __init__(self, model: Model):
        self.model = model
        self.classes = _first_by_name(model.classes)
        self.assocs = _first_by_name(model.associations)
        self.fixtures = _first_by_name(model.fixtures)
        self.tests = _first_by_name(model.tests)
        self.sds = _first_by_name(model.sds)
        self.flat: dict[str, EffectiveClass] = {}
        self._subs: Optional[dict[str, tuple[str, ...]]] = None
        self._trans: dict[tuple[str, str, str], tuple[tuple[int, Transition], ...]] = {}

    def is_subclass(self, sub: str, sup: str) -> bool:
        """Reflexive subclass test."""
        return sup in ancestry(self.model, sub)

    def direct_subclasses(self, name: str) -> tuple[str, ...]:
        if self._subs is None:
            subs: dict[str, list[str]] = {}
            for c in self.model.classes:
                if c.superclass is not None:
                    subs.setdefault(c.superclass, []).append(c.name)
            self._subs = {k: tuple(v) for k, v in subs.items()}
        return self._subs.get(name, ())

    def descendants(self, name: str) -> list[str]:
        """``name`` and all classes below it, in document order."""
        return [c.name for c in self.model.classes if self.is_subclass(c.name, name)]

    def transitions(self, cls: str, state: str, event: str) -> tuple[tuple[int, Transition], ...]:
        """Candidate transitions (with 1-based ordinal) in declaration order."""
        key = (cls, state, event)
        hit = self._trans.get(key)
        if hit is None:
            sc = flatten(self.model, cls).statechart
            hit = ()
            if sc is not None:
                hit = tuple((i, t) for i, t in enumerate(sc.transitions, 1)
                            if t.source == state and t.event == event)
            self._trans[key] = hit
        return hit


def _first_by_name(items) -> dict:
    out: dict = {}
    for it in items:
        out.setdefault(it.name, it)
    return out


def transition_id(cls: str, ordinal: int, t: Transition) -> str:
    return f"{cls}.{t.source}->{t.target}@{t.event}#{ordinal}"


def lifeline_class(model: Model, lifeline: str) -> Optional[str]:
    """Class of a scenario lifeline: a class name stands for an instance of
    that class, otherwise the first fixture object with that name decides."""
    if lifeline in model.index.classes:
        return lifeline
    for f in model.fixtures:
        o = f.object(lifeline)
        if o is not None:
            return o.cls
    return None
