"""OCL subset: typing, three-valued evaluation, invariant checking."""

from amt.ocl.evaluate import EvalContext, eval_expr, object_bindings
from amt.ocl.invariants import Violation, check_invariants
from amt.ocl.typecheck import TypeCheckError, TypeEnv, infer, typecheck
from amt.ocl.types import ANY, BOOLEAN, INTEGER, REAL, STRING, ClassType, CollType, PrimType
from amt.ocl.values import UNDEFINED, ObjRef, SeqV, SetV

__all__ = [
    "EvalContext", "eval_expr", "object_bindings", "Violation", "check_invariants",
    "TypeCheckError", "TypeEnv", "infer", "typecheck", "ANY", "BOOLEAN", "INTEGER",
    "REAL", "STRING", "ClassType", "CollType", "PrimType", "UNDEFINED", "ObjRef",
    "SeqV", "SetV",
]
