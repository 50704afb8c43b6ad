"""Runtime values of constraint evaluation.

Primitives are plain Python ``int``/``float``/``bool``/``str``; objects are
:class:`ObjRef`; collections are :class:`SetV`/:class:`SeqV`; the absence
of a value is the :data:`UNDEFINED` singleton.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1


class _Undefined:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Undefined"

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class ObjRef:
    oid: int

    def __repr__(self) -> str:
        return f"@{self.oid}"


@dataclass(frozen=True, eq=False)
class SetV:
    """Set value; ``items`` hold no duplicates and are kept in canonical
    order (object creation order for references)."""

    items: tuple[Any, ...] = ()

    def __eq__(self, other):
        if not isinstance(other, SetV):
            return NotImplemented
        return len(self.items) == len(other.items) and all(
            any(_same(a, b) for b in other.items) for a in self.items)

    def __hash__(self):
        return hash(frozenset(self.items))


@dataclass(frozen=True)
class SeqV:
    items: tuple[Any, ...] = ()


def _same(a: Any, b: Any) -> bool:
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def make_set(items) -> SetV:
    """Deduplicate preserving first-occurrence order."""
    out: list[Any] = []
    for it in items:
        if not any(_same(it, o) for o in out):
            out.append(it)
    return SetV(tuple(out))


def int_ok(v: int) -> bool:
    return INT_MIN <= v <= INT_MAX


def is_true(v: Any) -> bool:
    return v is True


def to_json(v: Any) -> Any:
    if v is UNDEFINED:
        return "undefined"
    if isinstance(v, ObjRef):
        return {"ref": v.oid}
    if isinstance(v, (SetV, SeqV)):
        return [to_json(x) for x in v.items]
    return v
