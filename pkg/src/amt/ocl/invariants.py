from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from amt.config import Configuration
from amt.expr import Expr
from amt.model import Model, flatten
from amt.ocl.evaluate import _Evaluator
from amt.ocl.values import ObjRef


@dataclass(frozen=True)
class Violation:
    oid: int
    object_name: str
    invariant: Expr
    value: Any  # False or UNDEFINED

    @property
    def span(self):
        return self.invariant.span


def check_invariants(model: Model, config: Configuration) -> list[Violation]:
    """Every (object, invariant) pair whose value is not true, in object
    creation order then invariant order."""
    ev = _Evaluator(model, config)
    out = []
    for o in config.objects:
        for inv in flatten(model, o.cls).invariants:
            v = ev.eval(inv, {"self": ObjRef(o.oid)})
            if v is not True:
                out.append(Violation(o.oid, o.name, inv, v))
    return out
