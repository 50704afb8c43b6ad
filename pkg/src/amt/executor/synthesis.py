"""Behavior synthesis for components known only through scenarios.

Each sequence diagram is projected onto the component's lifeline, giving a
word of receives and emits. The words are merged into a prefix tree; tree
nodes become states and every receive becomes a transition whose actions are
the emits that follow it. This is a deliberately small stand-in for full MSC
synthesis.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from amt.expr import Binary, Lit, Name, conj
from amt.model import (
    AssocDecl, Message, Model, Send, SequenceDiagram, Statechart, Transition, flatten,
    lifeline_class,
)


@dataclass(frozen=True)
class SynthesisConflict:
    kind: str  # divergent | spontaneous | unroutable | undeclared
    sds: tuple[str, ...]
    state: str
    event: str
    position: int  # index of the receive within the projected word
    message: str

    def __str__(self) -> str:
        return f"{self.kind} at {self.state} on {self.event}: {self.message}"


class SynthesisError(Exception):
    def __init__(self, conflicts: list[SynthesisConflict]):
        super().__init__("; ".join(str(c) for c in conflicts))
        self.conflicts = conflicts


def _key_str(op: str, args: tuple[Lit, ...]) -> str:
    return f"{op}({', '.join(repr(a.value) for a in args)})"


def route(model: Model, source_cls: str, target_cls: str) -> Optional[AssocDecl]:
    """Role used to reach an instance of ``target_cls``: an exact target match
    first, then any association whose target is a superclass."""
    roles = flatten(model, source_cls).roles
    for r in roles:
        if r.target == target_cls:
            return r
    for r in roles:
        if model.index.is_subclass(target_cls, r.target):
            return r
    return None


def project(model: Model, cls: str, sd: SequenceDiagram) -> list[list]:
    """Words of ``sd`` for each lifeline of class ``cls``; items are
    ``("recv", op, args)`` or ``("emit", Send | None, Message)``."""
    lifelines: list[str] = []
    for msg in sd.messages:
        for who in (msg.sender, msg.receiver):
            if who not in lifelines and who != "env":
                c = lifeline_class(model, who)
                if c is not None and model.index.is_subclass(c, cls):
                    lifelines.append(who)
    words = []
    for ll in lifelines:
        word: list = []
        for msg in sd.messages:
            if msg.receiver == ll:
                word.append(("recv", msg.op, msg.args))
            elif msg.sender == ll:
                target_cls = lifeline_class(model, msg.receiver)
                r = route(model, cls, target_cls) if target_cls else None
                send = Send((r.role,), msg.op, msg.args) if r is not None else None
                word.append(("emit", send, msg))
        words.append(word)
    return words


def synthesize(model: Model, cls: str, sds: Sequence[SequenceDiagram]) -> Statechart:
    """Build a statechart for ``cls`` from scenarios; raises SynthesisError."""
    eff = flatten(model, cls)
    conflicts: list[SynthesisConflict] = []
    # node -> {(op, args): [child, emits, sd name]}
    children: list[dict] = [{}]
    for sd in sds:
        for word in project(model, cls, sd):
            node, pos = 0, 0
            i = 0
            while i < len(word) and word[i][0] == "emit":
                conflicts.append(SynthesisConflict(
                    "spontaneous", (sd.name,), f"node{node}", word[i][2].op, 0,
                    f"{sd.name} emits {word[i][2].op} before receiving anything"))
                i += 1
            while i < len(word):
                _, op, args = word[i]
                i += 1
                emits = []
                while i < len(word) and word[i][0] == "emit":
                    send, msg = word[i][1], word[i][2]
                    if send is None:
                        conflicts.append(SynthesisConflict(
                            "unroutable", (sd.name,), f"node{node}", op, pos,
                            f"no role of {cls} reaches '{msg.receiver}'"))
                    else:
                        emits.append(send)
                    i += 1
                operation = eff.operation(op)
                if operation is None or len(operation.params) != len(args):
                    conflicts.append(SynthesisConflict(
                        "undeclared", (sd.name,), f"node{node}", op, pos,
                        f"{cls} has no operation {op} taking {len(args)} argument(s)"))
                    break
                key = (op, args)
                edge = children[node].get(key)
                if edge is None:
                    children.append({})
                    edge = [len(children) - 1, tuple(emits), sd.name]
                    children[node][key] = edge
                elif edge[1] != tuple(emits):
                    conflicts.append(SynthesisConflict(
                        "divergent", (edge[2], sd.name), f"node{node}", _key_str(op, args),
                        pos, f"{edge[2]} and {sd.name} emit different messages after "
                        f"{_key_str(op, args)}"))
                    break
                node = edge[0]
                pos += 1
    if conflicts:
        raise SynthesisError(conflicts)

    order: list[int] = []
    queue = deque([0])
    while queue:
        n = queue.popleft()
        order.append(n)
        queue.extend(edge[0] for edge in children[n].values())
    names = {n: f"S{i}" for i, n in enumerate(order)}
    transitions = []
    for n in order:
        for (op, args), (child, emits, _) in children[n].items():
            params = eff.operation(op).params
            guard = conj([Binary("=", Name(p.name), a) for p, a in zip(params, args)])
            transitions.append(Transition(names[n], names[child], op, guard, emits))
    return Statechart(tuple(names[n] for n in order), "S0", tuple(transitions))


def install(model: Model, cls: str, statechart: Statechart) -> Model:
    """Copy of ``model`` in which ``cls`` carries ``statechart``."""
    classes = tuple(replace(c, statechart=statechart) if c.name == cls else c
                    for c in model.classes)
    return replace(model, classes=classes)


def scenario_only_classes(model: Model) -> list[str]:
    """Classes without any statechart that receive messages in library SDs."""
    out = []
    for c in model.classes:
        if flatten(model, c.name).statechart is not None:
            continue
        for sd in model.sds:
            if any(lifeline_class(model, m.receiver) == c.name for m in sd.messages):
                out.append(c.name)
                break
    return out


def with_synthesized(model: Model) -> Model:
    """Install synthesized statecharts for every scenario-only class."""
    for cls in scenario_only_classes(model):
        model = install(model, cls, synthesize(model, cls, model.sds))
    return model


def emitted(trace, lifeline: str) -> list[tuple[str, str, tuple]]:
    """(receiver, op, args) of every message sent by ``lifeline`` in a trace."""
    return [(e.dst, e.op, e.args) for e in trace if e.kind == "send" and e.src == lifeline]


def receives(sd: SequenceDiagram, lifeline: str) -> list[Message]:
    return [m for m in sd.messages if m.receiver == lifeline]
