"""Model animation and scenario synthesis."""

from amt.executor.runtime import (
    DEFAULT_BUDGET, BudgetError, ExecutionError, InstantiationError, Trace, TraceEntry,
    UndefinedValueError, dispatch, instantiate, literal_args, make_event, replay, run_script,
    trace_to_json,
)
from amt.executor.synthesis import (
    SynthesisConflict, SynthesisError, install, project, synthesize, with_synthesized,
)

__all__ = [
    "DEFAULT_BUDGET", "BudgetError", "ExecutionError", "InstantiationError", "Trace",
    "TraceEntry", "UndefinedValueError", "dispatch", "instantiate", "literal_args",
    "make_event", "replay", "run_script", "trace_to_json", "SynthesisConflict",
    "SynthesisError", "install", "project", "synthesize", "with_synthesized",
]
