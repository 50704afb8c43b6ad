"""Test generation from statecharts by concrete reachability exploration, and
coverage measurement of existing suites.

Targets are states (``<class>.<state>``), transitions
(``<class>.<src>-><tgt>@<event>#<ordinal>``) or bounded transition paths
(transition ids joined by ``;``). A path is a sequence of consecutive
transitions taken by one object.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from amt.config import Configuration, Event
from amt.executor.runtime import (
    ExecutionError, Trace, TraceEntry, instantiate, literal_args, run_script,
)
from amt.expr import Expr, Name, Nav, lit, transform_scoped
from amt.model import (
    ENV, Assert, Message, Model, ModelError, ObjDecl, ObjectDiagram, TestCase, flatten,
    transition_id,
)
from amt.testkit.runner import ERROR, run_test

STATE, TRANSITION, PATH = "state", "transition", "path"
DEFAULT_DEPTH = 3


@dataclass(frozen=True)
class ValuePool:
    """Candidate argument values per primitive type."""

    values: tuple[tuple[str, tuple[Any, ...]], ...] = (
        ("Integer", (-1, 0, 1)),
        ("Boolean", (True, False)),
        ("String", ("", "x")),
        ("Real", (-1.0, 0.0, 1.0)),
    )

    def of(self, type_name: str) -> tuple[Any, ...]:
        return dict(self.values).get(type_name, ())

    def with_values(self, **overrides: Iterable[Any]) -> "ValuePool":
        merged = dict(self.values)
        for k, v in overrides.items():
            merged[k] = tuple(float(x) if k == "Real" else x for x in v)
        return ValuePool(tuple(merged.items()))

    @classmethod
    def from_json(cls, text: str) -> "ValuePool":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("value pool must be a JSON object of type -> list")
        checks = {"Integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
                  "Real": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
                  "Boolean": lambda v: isinstance(v, bool),
                  "String": lambda v: isinstance(v, str)}
        for k, vs in data.items():
            if k not in checks or not isinstance(vs, list) or not all(map(checks[k], vs)):
                raise ValueError(f"bad value pool entry for '{k}'")
        return cls().with_values(**data)


@dataclass(frozen=True)
class Bounds:
    max_nodes: int = 10_000
    max_depth: int = 50


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    event: Message
    fired: tuple[tuple[int, int], ...]  # (object id, transition ordinal) in firing order
    dropped: bool


@dataclass
class ReachGraph:
    cls: str
    nodes: list[Configuration]
    depth: list[int]
    edges: list[Edge]
    out: list[list[int]]  # node -> edge indices, in exploration order
    truncated: bool = False
    failed_events: int = 0  # events whose run ended in an execution error

    @property
    def root(self) -> Configuration:
        return self.nodes[0]


def _instances(model: Model, config: Configuration, cls: str) -> list[int]:
    return [o.oid for o in config.objects if model.index.is_subclass(o.cls, cls)]


def _events(model: Model, config: Configuration, cls: str, pool: ValuePool) -> list[Message]:
    out = []
    ops = flatten(model, cls).operations
    for oid in _instances(model, config, cls):
        name = config.obj(oid).name
        for op in ops:
            for args in itertools.product(*(pool.of(p.type) for p in op.params)):
                out.append(Message(ENV, name, op.name, literal_args(args)))
    return out


def _fired(model: Model, config: Configuration, cls: str, trace: Trace
           ) -> tuple[tuple[int, int], ...]:
    owner = flatten(model, cls).statechart_owner
    return tuple((e.oid, e.transition) for e in trace
                 if e.kind == "state_change" and e.transition is not None
                 and model.index.is_subclass(config.obj(e.oid).cls, cls)
                 and flatten(model, config.obj(e.oid).cls).statechart_owner == owner)


def explore(model: Model, fixture: str, cls: str, pool: ValuePool = ValuePool(),
            bounds: Bounds = Bounds()) -> ReachGraph:
    """Breadth-first reachable configuration graph under env events sent to
    the instances of ``cls``."""
    eff = flatten(model, cls)
    if eff.statechart is None:
        raise ModelError("E_NO_STATECHART", f"{cls} has no statechart")
    root = instantiate(model, fixture)
    g = ReachGraph(cls, [root], [0], [], [[]])
    seen = {root: 0}
    events = _events(model, root, cls, pool)
    queue = deque([0])
    while queue:
        n = queue.popleft()
        if g.depth[n] >= bounds.max_depth:
            g.truncated = True
            continue
        config = g.nodes[n]
        for msg in events:
            target = config.by_name[msg.receiver]
            op = flatten(model, config.obj(target).cls).operation(msg.op)
            args = tuple(float(a.value) if p.type == "Real" else a.value
                         for a, p in zip(msg.args, op.params))
            try:
                nxt, trace = run_script(model, config, [Event(target, msg.op, args)])
            except ExecutionError:
                g.failed_events += 1
                continue
            m = seen.get(nxt)
            if m is None:
                if len(g.nodes) >= bounds.max_nodes:
                    g.truncated = True
                    continue
                m = len(g.nodes)
                seen[nxt] = m
                g.nodes.append(nxt)
                g.depth.append(g.depth[n] + 1)
                g.out.append([])
                queue.append(m)
            dropped = any(e.kind == "dropped" and e.oid == target for e in trace[:2])
            g.out[n].append(len(g.edges))
            g.edges.append(Edge(n, m, msg, _fired(model, config, cls, trace), dropped))
    return g


# -- targets ----------------------------------------------------------------

def state_id(cls: str, state: str) -> str:
    return f"{cls}.{state}"


def targets(model: Model, cls: str, criterion: str, k: int = DEFAULT_DEPTH) -> list[str]:
    sc = flatten(model, cls).statechart
    if sc is None:
        return []
    if criterion == STATE:
        return [state_id(cls, s) for s in sc.states]
    ids = {i: transition_id(cls, i, t) for i, t in enumerate(sc.transitions, 1)}
    if criterion == TRANSITION:
        return list(ids.values())
    if criterion != PATH:
        raise ValueError(f"unknown coverage criterion '{criterion}'")
    out: list[str] = []
    layer = [(i,) for i in ids]
    for _ in range(k):
        out.extend(";".join(ids[i] for i in p) for p in layer)
        layer = [p + (j,) for p in layer for j in ids
                 if sc.transitions[p[-1] - 1].target == sc.transitions[j - 1].source]
    return out


class _Tracker:
    """Covered targets along a run, fed one batch of fired transitions at a
    time. ``hist`` keeps the last k-1 ordinals per object for path targets."""

    def __init__(self, model: Model, cls: str, criterion: str, k: int):
        self.cls, self.criterion, self.k = cls, criterion, k
        sc = flatten(model, cls).statechart
        self.sc = sc
        self.ids = {i: transition_id(cls, i, t) for i, t in enumerate(sc.transitions, 1)}

    def start(self, model: Model, config: Configuration) -> set[str]:
        if self.criterion != STATE:
            return set()
        return {state_id(self.cls, config.obj(o).state)
                for o in _instances(model, config, self.cls)
                if config.obj(o).state in self.sc.states}

    def step(self, hist: tuple, fired: Iterable[tuple[int, int]]) -> tuple[tuple, set[str]]:
        covered: set[str] = set()
        h = dict(hist)
        for oid, t in fired:
            if self.criterion == STATE:
                covered.add(state_id(self.cls, self.sc.transitions[t - 1].target))
            elif self.criterion == TRANSITION:
                covered.add(self.ids[t])
            else:
                seq = h.get(oid, ()) + (t,)
                for j in range(1, min(self.k, len(seq)) + 1):
                    covered.add(";".join(self.ids[x] for x in seq[-j:]))
                h[oid] = seq[-(self.k - 1):] if self.k > 1 else ()
        return (tuple(sorted(h.items())) if self.criterion == PATH else ()), covered


@dataclass
class CoverageReport:
    criterion: str
    targets: list[str]
    covered: list[str]
    uncovered: list[str]
    infeasible: list[str] = field(default_factory=list)  # within exploration bounds
    skipped: list[str] = field(default_factory=list)  # tests with an error verdict
    truncated: bool = False

    @property
    def ratio(self) -> float:
        return len(self.covered) / len(self.targets) if self.targets else 1.0

    def to_json(self) -> dict:
        d = {"criterion": self.criterion, "covered": self.covered,
             "uncovered": self.uncovered, "infeasible_within_bounds": self.infeasible,
             "ratio": self.ratio}
        if self.skipped:
            d["skipped"] = self.skipped
        if self.truncated:
            d["truncated"] = True
        return d


def _report(criterion: str, all_targets: list[str], covered: set[str],
            infeasible: set[str] = frozenset(), **kw) -> CoverageReport:
    return CoverageReport(
        criterion, list(all_targets), [t for t in all_targets if t in covered],
        [t for t in all_targets if t not in covered and t not in infeasible],
        [t for t in all_targets if t in infeasible and t not in covered], **kw)


def criterion_label(criterion: str, k: int) -> str:
    return f"path({k})" if criterion == PATH else criterion


# -- generation -------------------------------------------------------------

def bind_self(expr: Expr, model: Model, cls: str, obj: str) -> Expr:
    """Rewrite a class invariant so it talks about the object named ``obj``."""
    eff = flatten(model, cls)

    def fn(e: Expr, bound: frozenset) -> Optional[Expr]:
        if isinstance(e, Name) and e.name not in bound:
            if e.name == "self":
                return Name(obj, e.span)
            if eff.attribute(e.name) is not None or eff.role(e.name) is not None:
                return Nav(Name(obj), e.name, e.span)
        return None

    return transform_scoped(expr, fn)


def characterize(model: Model, name: str, fixture: str, cls: str, trigger: Sequence[Message],
                 final: Configuration) -> TestCase:
    """A test whose oracle records the final configuration of every instance
    of ``cls`` and asserts the class invariants on each."""
    objs = []
    asserts = []
    for oid in _instances(model, final, cls):
        o = final.obj(oid)
        objs.append(ObjDecl(o.name, o.cls, tuple((a, lit(v)) for a, v in o.attrs), o.state))
        for inv in flatten(model, o.cls).invariants:
            asserts.append(Assert(bind_self(inv, model, o.cls, o.name)))
    return TestCase(name, fixture, tuple(trigger), tuple(asserts),
                    ObjectDiagram("", tuple(objs)))


@dataclass
class Generation:
    tests: list[TestCase]
    report: CoverageReport
    graph: ReachGraph


def _witnesses(g: ReachGraph, tracker: "_Tracker", wanted: set[str], start_cov: set[str],
               limit: int) -> tuple[dict[str, tuple[int, ...]], bool]:
    """Shortest edge path covering each target: BFS over (node, history), where
    the first discovery of a target is a shortest witness."""
    witness: dict[str, tuple[int, ...]] = {t: () for t in start_cov}
    key0 = (0, ())
    parent: dict[tuple, Optional[tuple[tuple, int]]] = {key0: None}
    queue = deque([key0])
    truncated = False
    while queue and len(witness) < len(wanted):
        key = queue.popleft()
        node, hist = key
        for ei in g.out[node]:
            e = g.edges[ei]
            nhist, cov = tracker.step(hist, e.fired)
            nkey = (e.dst, nhist)
            fresh = [t for t in cov if t in wanted and t not in witness]
            if fresh:
                path = _edges_to(parent, key) + (ei,)
                for t in fresh:
                    witness[t] = path
            if nkey not in parent:
                if len(parent) >= limit:
                    truncated = True
                    continue
                parent[nkey] = (key, ei)
                queue.append(nkey)
    return witness, truncated


def generate(model: Model, fixture: str, cls: str, criterion: str = TRANSITION,
             pool: ValuePool = ValuePool(), bounds: Bounds = Bounds(),
             k: int = DEFAULT_DEPTH, graph: Optional[ReachGraph] = None) -> Generation:
    """Characterization tests covering ``criterion`` targets of ``cls``.

    Without a prebuilt graph, exploration deepens geometrically and stops as
    soon as every target has a witness no longer than the explored depth;
    such witnesses are the same ones a full-depth exploration would find.
    """
    if criterion == PATH and k < 1:
        raise ValueError("path length must be at least 1")
    tracker = _Tracker(model, cls, criterion, k)
    all_targets = targets(model, cls, criterion, k)
    wanted = set(all_targets)
    limit = bounds.max_nodes * (k if criterion == PATH else 1)
    depth = min(4, bounds.max_depth)
    while True:
        g = graph if graph is not None else explore(
            model, fixture, cls, pool, Bounds(bounds.max_nodes, depth))
        start_cov = tracker.start(model, g.root) & wanted
        witness, truncated = _witnesses(g, tracker, wanted, start_cov, limit)
        done = (graph is not None or depth >= bounds.max_depth or not g.truncated
                or len(g.nodes) >= bounds.max_nodes or truncated)
        if done or (len(witness) == len(wanted)
                    and all(len(p) <= depth for p in witness.values())):
            break
        depth = min(depth * 2, bounds.max_depth)
    truncated = truncated or g.truncated

    tests: list[TestCase] = []
    covered: set[str] = set(start_cov)
    label = "path" if criterion == PATH else criterion
    for t in all_targets:
        if t in covered or t not in witness:
            continue
        path = witness[t]
        hist: tuple = ()
        for ei in path:
            hist, cov = tracker.step(hist, g.edges[ei].fired)
            covered |= cov & wanted
        name = _fresh_name(model, tests, f"gen_{label}_{len(tests) + 1}")
        final = g.nodes[g.edges[path[-1]].dst]
        tests.append(characterize(model, name, fixture, cls,
                                  [g.edges[ei].event for ei in path], final))
    infeasible = wanted - set(witness)
    return Generation(tests, _report(criterion_label(criterion, k), all_targets, covered,
                                     infeasible, truncated=truncated), g)


def _edges_to(parent: dict, key: tuple) -> tuple[int, ...]:
    out = []
    while parent[key] is not None:
        key, ei = parent[key]
        out.append(ei)
    return tuple(reversed(out))


def _fresh_name(model: Model, tests: list[TestCase], name: str) -> str:
    taken = set(model.index.tests) | {t.name for t in tests}
    base, n = name.rsplit("_", 1)
    n_i = int(n)
    while name in taken:
        n_i += 1
        name = f"{base}_{n_i}"
    return name


def measure(model: Model, tests: Sequence[TestCase], cls: str, criterion: str = TRANSITION,
            k: int = DEFAULT_DEPTH) -> CoverageReport:
    """Coverage of ``cls``'s statechart reached by running ``tests``."""
    all_targets = targets(model, cls, criterion, k)
    wanted = set(all_targets)
    tracker = _Tracker(model, cls, criterion, k) if all_targets else None
    covered: set[str] = set()
    skipped = []
    for t in tests:
        result = run_test(model, t)
        if result.verdict.kind == ERROR:
            skipped.append(t.name)
            continue
        if tracker is None:
            continue
        start = instantiate(model, t.fixture)
        covered |= tracker.start(model, start) & wanted
        _, cov = tracker.step((), _fired(model, start, cls, result.trace))
        covered |= cov & wanted
    return _report(criterion_label(criterion, k), all_targets, covered, skipped=skipped)


def fired_transitions(model: Model, config: Configuration, cls: str,
                      trace: Sequence[TraceEntry]) -> tuple[tuple[int, int], ...]:
    return _fired(model, config, cls, list(trace))
