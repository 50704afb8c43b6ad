"""Model animation with run-to-completion semantics.

One external event is processed together with every event it transitively
enqueues before :func:`dispatch` returns. Configurations are never mutated;
each step builds a new one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Any, Callable, Iterable, Optional

from amt.config import Configuration, Event, Link, ObjState
from amt.expr import Lit, lit
from amt.model import ENV, MANY, Assign, Message, Model, ModelError, flatten
from amt.ocl.evaluate import _Evaluator
from amt.ocl.invariants import Violation, check_invariants
from amt.ocl.values import UNDEFINED, ObjRef

DEFAULT_BUDGET = 10_000
DEFAULTS = {"Integer": 0, "Real": 0.0, "Boolean": False, "String": ""}


@dataclass(frozen=True)
class TraceEntry:
    """One execution record. ``kind`` is call, send, state_change, assign or
    dropped; ``dst`` names the object acted upon for state_change/assign."""

    kind: str
    src: Optional[str] = None
    dst: Optional[str] = None
    op: Optional[str] = None
    args: tuple[Any, ...] = ()
    attr: Optional[str] = None
    old: Any = None
    new: Any = None
    from_: Optional[str] = None
    to: Optional[str] = None
    oid: Optional[int] = None  # object id of dst
    transition: Optional[int] = None  # 1-based ordinal in dst's statechart

    def is_message(self) -> bool:
        return self.kind in ("call", "send")

    def to_json(self, seq: int) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "seq": seq}
        if self.kind in ("call", "send", "dropped"):
            d.update(src=self.src, dst=self.dst, op=self.op, args=list(self.args))
        elif self.kind == "assign":
            d.update(dst=self.dst, attr=self.attr, old=self.old, new=self.new)
        elif self.kind == "state_change":
            d.update({"dst": self.dst, "from": self.from_, "to": self.to})
        return d


Trace = list[TraceEntry]


def trace_to_json(trace: Iterable[TraceEntry]) -> list[dict[str, Any]]:
    return [e.to_json(i) for i, e in enumerate(trace)]


class ExecutionError(Exception):
    def __init__(self, message: str, config: Configuration, trace: Trace):
        super().__init__(message)
        self.config = config
        self.trace = trace


class BudgetError(ExecutionError):
    """Run-to-completion did not terminate within the step budget."""


class UndefinedValueError(ExecutionError):
    """An action produced Undefined for an attribute or an argument."""


class InstantiationError(Exception):
    def __init__(self, message: str, violations: tuple[Violation, ...] = ()):
        super().__init__(message)
        self.violations = violations


def coerce(value: Any, type_name: str) -> Any:
    if type_name == "Real" and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


def instantiate(model: Model, fixture_name: str) -> Configuration:
    """Create the configuration described by a fixture object diagram."""
    try:
        fx = model.fixture(fixture_name)
    except ModelError as e:
        raise InstantiationError(str(e)) from None
    objects: list[ObjState] = []
    names: dict[str, int] = {}
    for od in fx.objects:
        if od.cls not in model.index.classes:
            raise InstantiationError(f"{od.name}: unknown class '{od.cls}'")
        if od.name in names:
            raise InstantiationError(f"duplicate object '{od.name}'")
        eff = flatten(model, od.cls)
        given = dict(od.values)
        for attr in given:
            if eff.attribute(attr) is None:
                raise InstantiationError(f"{od.name}: {od.cls} has no attribute '{attr}'")
        attrs = []
        for a in eff.attributes:
            given_lit = given.get(a.name)
            if given_lit is None:
                attrs.append((a.name, DEFAULTS[a.type]))
            elif given_lit.kind != a.type and not (given_lit.kind == "Integer"
                                                   and a.type == "Real"):
                raise InstantiationError(f"{od.name}.{a.name}: expected {a.type}, "
                                         f"found {given_lit.kind}")
            else:
                attrs.append((a.name, coerce(given_lit.value, a.type)))
        state = None
        if eff.statechart is not None:
            state = od.state if od.state is not None else eff.statechart.initial
            if state not in eff.statechart.states:
                raise InstantiationError(f"{od.name}: unknown state '{state}'")
        elif od.state is not None:
            raise InstantiationError(f"{od.name}: {od.cls} has no statechart")
        oid = len(objects)
        names[od.name] = oid
        objects.append(ObjState(oid, od.name, od.cls, tuple(attrs), state))
    links = []
    for lk in fx.links:
        a = model.index.assocs.get(lk.assoc)
        if a is None:
            raise InstantiationError(f"unknown association '{lk.assoc}'")
        if lk.source not in names or lk.target not in names:
            raise InstantiationError(f"link {lk.assoc}: unknown object")
        s, t = objects[names[lk.source]], objects[names[lk.target]]
        if not (model.index.is_subclass(s.cls, a.source)
                and model.index.is_subclass(t.cls, a.target)):
            raise InstantiationError(f"link {lk.assoc} {lk.source} -> {lk.target}: "
                                     "classes do not conform")
        links.append(Link(a.name, s.oid, t.oid))
    config = Configuration(tuple(objects), tuple(links), (), len(objects))
    violations = check_invariants(model, config)
    if violations:
        v = violations[0]
        raise InstantiationError(
            f"fixture {fixture_name} violates an invariant of {v.object_name}",
            tuple(violations))
    return config


def make_event(model: Model, config: Configuration, msg: Message) -> Event:
    """Turn a scenario message with literal arguments into an event."""
    ids = config.by_name
    if msg.receiver not in ids:
        raise ModelError("E_UNKNOWN_OBJECT", f"unknown object '{msg.receiver}'")
    origin = None
    if msg.sender != ENV:
        if msg.sender not in ids:
            raise ModelError("E_UNKNOWN_OBJECT", f"unknown object '{msg.sender}'")
        origin = ids[msg.sender]
    target = config.obj(ids[msg.receiver])
    op = flatten(model, target.cls).operation(msg.op)
    if op is None:
        raise ModelError("E_UNKNOWN_EVENT", f"'{msg.op}' is not an operation of {target.cls}")
    if len(op.params) != len(msg.args):
        raise ModelError("E_ARITY", f"{msg.op} expects {len(op.params)} argument(s)")
    for p, a in zip(op.params, msg.args):
        if a.kind != p.type and not (a.kind == "Integer" and p.type == "Real"):
            raise ModelError("E_TYPE", f"argument '{p.name}' of {msg.op} expects {p.type}, "
                             f"found {a.kind}")
    args = tuple(coerce(a.value, p.type) for a, p in zip(msg.args, op.params))
    return Event(target.oid, msg.op, args, origin)


def literal_args(args: Iterable[Any]) -> tuple[Lit, ...]:
    return tuple(lit(a) for a in args)


def dispatch(model: Model, config: Configuration, event: Event,
             budget: int = DEFAULT_BUDGET,
             on_step: Optional[Callable[[Configuration], None]] = None,
             ) -> tuple[Configuration, Trace]:
    """Process ``event`` and drain the queue it causes (run to completion)."""
    trace: Trace = []
    queue = deque(config.queue)
    queue.append(event)
    config = config.with_queue(())
    steps = 0
    while queue:
        if steps >= budget:
            raise BudgetError(f"run-to-completion exceeded {budget} steps",
                              config.with_queue(tuple(queue)), trace)
        ev = queue.popleft()
        steps += 1
        config = _step(model, config, ev, trace, queue)
        if on_step is not None:
            on_step(config)
    return config, trace


def run_script(model: Model, config: Configuration, events: Iterable[Event],
               budget: int = DEFAULT_BUDGET,
               on_step: Optional[Callable[[Configuration], None]] = None,
               ) -> tuple[Configuration, Trace]:
    trace: Trace = []
    for ev in events:
        try:
            config, t = dispatch(model, config, ev, budget, on_step)
        except ExecutionError as e:
            raise type(e)(str(e), e.config, trace + e.trace) from None
        trace.extend(t)
    return config, trace


def _step(model: Model, config: Configuration, ev: Event, trace: Trace,
          queue: deque) -> Configuration:
    tgt = config.obj(ev.target)
    src = ENV if ev.origin is None else config.obj(ev.origin).name
    kind = "call" if ev.origin is None else "send"
    trace.append(TraceEntry(kind, src=src, dst=tgt.name, op=ev.op, args=ev.args,
                            oid=tgt.oid))
    eff = flatten(model, tgt.cls)
    op = eff.operation(ev.op)
    chosen = None
    if eff.statechart is not None and tgt.state is not None and op is not None:
        env: dict[str, Any] = {"self": ObjRef(tgt.oid)}
        for p, v in zip(op.params, ev.args):
            env[p.name] = v
        evaluator = _Evaluator(model, config)
        for ordinal, t in model.index.transitions(tgt.cls, tgt.state, ev.op):
            if t.guard is None or evaluator.eval(t.guard, env) is True:
                chosen = (ordinal, t)
                break
    if chosen is None:
        trace.append(TraceEntry("dropped", src=src, dst=tgt.name, op=ev.op, args=ev.args,
                                oid=tgt.oid))
        return config
    ordinal, t = chosen
    for action in t.actions:
        evaluator = _Evaluator(model, config)
        if isinstance(action, Assign):
            value = evaluator.eval(action.expr, env)
            if value is UNDEFINED:
                raise UndefinedValueError(
                    f"{tgt.name}.{action.attr} := Undefined", config, trace)
            obj = config.obj(tgt.oid)
            value = coerce(value, eff.attribute(action.attr).type)
            old = obj.get(action.attr)
            config = config.with_object(obj.with_attr(action.attr, value))
            trace.append(TraceEntry("assign", dst=tgt.name, attr=action.attr, old=old,
                                    new=value, oid=tgt.oid))
            continue
        args = tuple(evaluator.eval(a, env) for a in action.args)
        if any(a is UNDEFINED for a in args):
            raise UndefinedValueError(f"{tgt.name}: send {action.op} with an Undefined "
                                      "argument", config, trace)
        for target in _route(model, config, tgt.oid, action.path):
            top = flatten(model, config.obj(target).cls).operation(action.op)
            targs = args
            if top is not None:
                targs = tuple(coerce(v, p.type) for v, p in zip(args, top.params))
            queue.append(Event(target, action.op, targs, tgt.oid))
    obj = config.obj(tgt.oid)
    trace.append(TraceEntry("state_change", dst=tgt.name, from_=obj.state, to=t.target,
                            oid=tgt.oid, transition=ordinal))
    return config.with_object(replace(obj, state=t.target))


def _route(model: Model, config: Configuration, start: int, path: tuple[str, ...]) -> list[int]:
    """Objects reached from ``start`` along role names, in link-creation order."""
    current = [start]
    for role in path:
        nxt: list[int] = []
        for oid in current:
            r = flatten(model, config.obj(oid).cls).role(role)
            if r is None:
                continue
            targets = config.targets(oid, r.name)
            nxt.extend(targets if r.multiplicity == MANY else targets[:1])
        current = nxt
    return current


def replay(config: Configuration, trace: Trace, upto: int) -> Configuration:
    """Configuration after applying the effects of ``trace[:upto]`` to the
    configuration the trace started from."""
    for e in trace[:upto]:
        if e.kind == "assign":
            config = config.with_object(config.obj(e.oid).with_attr(e.attr, e.new))
        elif e.kind == "state_change":
            config = config.with_object(replace(config.obj(e.oid), state=e.to))
    return config
