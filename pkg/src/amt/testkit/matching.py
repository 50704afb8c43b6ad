"""Matching partial object-diagram patterns against configurations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from amt.config import Configuration, ObjState
from amt.model import Model, ObjDecl, ObjectDiagram
from amt.ocl.evaluate import values_equal


@dataclass(frozen=True)
class MatchResult:
    """``mapping`` pairs pattern names with object ids. When ``matched`` is
    false it holds the largest consistent partial mapping found."""

    matched: bool
    mapping: tuple[tuple[str, int], ...] = ()

    def __bool__(self) -> bool:
        return self.matched

    def as_dict(self) -> dict[str, int]:
        return dict(self.mapping)


def object_fits(model: Model, pat: ObjDecl, obj: ObjState) -> bool:
    """Class, attribute and state constraints of a single pattern object."""
    if pat.cls not in model.index.classes or not model.index.is_subclass(obj.cls, pat.cls):
        return False
    for attr, lit in pat.values:
        if not obj.has(attr) or not values_equal(obj.get(attr), lit.value):
            return False
    return pat.state is None or obj.state == pat.state


def match_od(model: Model, pattern: ObjectDiagram, config: Configuration,
             anchors: Optional[Mapping[str, int]] = None) -> MatchResult:
    """First injective mapping of ``pattern`` into ``config``.

    Names in ``anchors`` (by default the object names of ``config``, which are
    the fixture names) are rigid and must map to that object; other names are
    existential. Variables are tried most-constrained first, candidates in
    object creation order.
    """
    if anchors is None:
        anchors = config.by_name
    pats = list(pattern.objects)
    cands: dict[str, list[int]] = {}
    for p in pats:
        pool = [anchors[p.name]] if p.name in anchors else range(len(config.objects))
        cands[p.name] = [oid for oid in pool if object_fits(model, p, config.obj(oid))]
    degree = {p.name: 0 for p in pats}
    for lk in pattern.links:
        for n in (lk.source, lk.target):
            if n in degree:
                degree[n] += 1
    decl = {p.name: i for i, p in enumerate(pats)}
    order = sorted(degree, key=lambda n: (len(cands[n]), -degree[n], decl[n]))
    links = set((lk.assoc, lk.source, lk.target) for lk in pattern.links)
    present = set((lk.assoc, lk.source, lk.target) for lk in config.links)
    if any(s not in decl or t not in decl for _, s, t in links):
        return MatchResult(False, ())

    assigned: dict[str, int] = {}
    used: set[int] = set()
    best: list[tuple[str, int]] = []

    def consistent(name: str) -> bool:
        for assoc, s, t in links:
            if name in (s, t) and s in assigned and t in assigned:
                if (assoc, assigned[s], assigned[t]) not in present:
                    return False
        return True

    def search(i: int) -> bool:
        nonlocal best
        if len(assigned) > len(best):
            best = list(assigned.items())
        if i == len(order):
            return True
        name = order[i]
        for oid in cands[name]:
            if oid in used:
                continue
            assigned[name] = oid
            used.add(oid)
            if consistent(name) and search(i + 1):
                return True
            del assigned[name]
            used.discard(oid)
        return False

    # a variable without candidates dooms the match; search the others only
    # to report the best partial mapping
    hopeless = any(not cands[n] for n in order)
    if hopeless:
        order = [n for n in order if cands[n]]
    if search(0) and not hopeless:
        return MatchResult(True, tuple((p.name, assigned[p.name]) for p in pats))
    return MatchResult(False, tuple(sorted(best, key=lambda kv: decl[kv[0]])))
