"""Observation conformance by projection onto the observed sender/receiver pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from amt.executor.runtime import TraceEntry, literal_args
from amt.model import Message
from amt.ocl.evaluate import values_equal
from amt.syntax.printer import format_message


@dataclass(frozen=True)
class ObservationMismatch:
    expected: tuple[str, ...]
    actual: tuple[str, ...]  # the projected trace window

    kind = "observation_mismatch"

    def to_json(self) -> dict:
        return {"kind": self.kind, "expected": list(self.expected), "actual": list(self.actual)}


def observed_pairs(expected: Iterable[Message]) -> set[tuple[str, str]]:
    return {(m.sender, m.receiver) for m in expected}


def projection(trace: Sequence[TraceEntry], pairs: set[tuple[str, str]]) -> list[int]:
    """Indices of call/send entries whose (src, dst) pair is in ``pairs``."""
    return [i for i, e in enumerate(trace) if e.is_message() and (e.src, e.dst) in pairs]


def entry_matches(msg: Message, e: TraceEntry) -> bool:
    return (e.src == msg.sender and e.dst == msg.receiver and e.op == msg.op
            and len(e.args) == len(msg.args)
            and all(values_equal(a, lit.value) for a, lit in zip(e.args, msg.args)))


def show_entry(e: TraceEntry) -> str:
    return format_message(Message(e.src, e.dst, e.op, literal_args(e.args))).rstrip(";")


def check_conformance(expected: Sequence[Message], trace: Sequence[TraceEntry],
                      pairs: Optional[set[tuple[str, str]]] = None,
                      ) -> Optional[ObservationMismatch]:
    """None when the projected trace equals ``expected`` exactly."""
    if pairs is None:
        pairs = observed_pairs(expected)
    idx = projection(trace, pairs)
    if len(idx) == len(expected) and all(entry_matches(m, trace[i])
                                         for m, i in zip(expected, idx)):
        return None
    return ObservationMismatch(tuple(format_message(m).rstrip(";") for m in expected),
                               tuple(show_entry(trace[i]) for i in idx))
