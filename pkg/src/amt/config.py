"""Runtime snapshots: objects with attribute values and states, links, and the
pending event queue."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Optional

ENV_ORIGIN = None  # Event.origin for environment-sent events


@dataclass(frozen=True)
class ObjState:
    oid: int
    name: str
    cls: str
    attrs: tuple[tuple[str, Any], ...]
    state: Optional[str] = None

    def get(self, attr: str, default: Any = None) -> Any:
        for k, v in self.attrs:
            if k == attr:
                return v
        return default

    def has(self, attr: str) -> bool:
        return any(k == attr for k, _ in self.attrs)

    def with_attr(self, attr: str, value: Any) -> "ObjState":
        return replace(self, attrs=tuple((k, value if k == attr else v) for k, v in self.attrs))


@dataclass(frozen=True)
class Link:
    assoc: str
    source: int
    target: int


@dataclass(frozen=True)
class Event:
    target: int
    op: str
    args: tuple[Any, ...] = ()
    origin: Optional[int] = ENV_ORIGIN  # None = env, else sending object id


@dataclass(frozen=True)
class Configuration:
    objects: tuple[ObjState, ...] = ()  # creation order; oid == position
    links: tuple[Link, ...] = ()  # creation order
    queue: tuple[Event, ...] = ()
    next_id: int = 0

    def obj(self, oid: int) -> ObjState:
        return self.objects[oid]

    @cached_property
    def by_name(self) -> dict[str, int]:
        return {o.name: o.oid for o in self.objects}

    @cached_property
    def _targets(self) -> dict[tuple[int, str], tuple[int, ...]]:
        out: dict[tuple[int, str], list[int]] = {}
        for lk in self.links:
            out.setdefault((lk.source, lk.assoc), []).append(lk.target)
        return {k: tuple(v) for k, v in out.items()}

    def targets(self, oid: int, assoc: str) -> tuple[int, ...]:
        """Linked targets of ``oid`` over ``assoc`` in link-creation order."""
        return self._targets.get((oid, assoc), ())

    def with_object(self, o: ObjState) -> "Configuration":
        objs = list(self.objects)
        objs[o.oid] = o
        return self._share(Configuration(tuple(objs), self.links, self.queue, self.next_id))

    def with_queue(self, queue: tuple[Event, ...]) -> "Configuration":
        return self._share(Configuration(self.objects, self.links, queue, self.next_id))

    def _share(self, other: "Configuration") -> "Configuration":
        # links are unchanged, so the derived link index can be reused
        for key in ("by_name", "_targets"):
            if key in self.__dict__:
                other.__dict__[key] = self.__dict__[key]
        return other
