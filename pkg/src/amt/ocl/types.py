from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from amt.model import Model, PRIMITIVES


@dataclass(frozen=True)
class PrimType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ClassType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class CollType:
    kind: str  # "Set" | "Sequence"
    elem: "Type"

    def __str__(self) -> str:
        return f"{self.kind}({self.elem})"


@dataclass(frozen=True)
class AnyType:
    """Type of an ill-typed subexpression; conforms both ways so a single
    mistake yields a single diagnostic."""

    def __str__(self) -> str:
        return "<error>"


Type = Union[PrimType, ClassType, CollType, AnyType]

INTEGER = PrimType("Integer")
REAL = PrimType("Real")
BOOLEAN = PrimType("Boolean")
STRING = PrimType("String")
ANY = AnyType()

_PRIM = {p: PrimType(p) for p in PRIMITIVES}


def prim(name: str) -> Optional[PrimType]:
    return _PRIM.get(name)


def is_numeric(t: Type) -> bool:
    return t in (INTEGER, REAL) or t is ANY


def conforms(model: Model, t: Type, u: Type) -> bool:
    """``t`` may be used where ``u`` is expected."""
    if t is ANY or u is ANY or t == u:
        return True
    if t == INTEGER and u == REAL:
        return True
    if isinstance(t, ClassType) and isinstance(u, ClassType):
        return model.index.is_subclass(t.name, u.name)
    if isinstance(t, CollType) and isinstance(u, CollType):
        return t.kind == u.kind and conforms(model, t.elem, u.elem)
    return False


def comparable(model: Model, t: Type, u: Type) -> bool:
    return conforms(model, t, u) or conforms(model, u, t)
