"""Transformation pipelines and regression comparison against the test suite."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from amt.evolution.transform import (
    RenameClass, RenameOperation, Transformation, TransformationError, apply,
)
from amt.executor.runtime import InstantiationError, TraceEntry, instantiate
from amt.model import Model, Observe, TestCase
from amt.testkit.conformance import show_entry
from amt.testkit.runner import SuiteReport, run_suite


@dataclass(frozen=True)
class RenameMap:
    """Operation renames performed by a pipeline, kept with the model each
    step was applied to so that class membership is judged correctly."""

    steps: tuple[tuple[Model, Transformation], ...] = ()

    def op(self, cls: str, op: str) -> str:
        """Name after the pipeline of operation ``op`` received by an object
        of class ``cls`` (a class of the original model)."""
        for m, t in self.steps:
            if isinstance(t, RenameClass) and cls == t.old:
                cls = t.new
            elif (isinstance(t, RenameOperation) and op == t.old
                  and cls in m.index.classes and m.index.is_subclass(cls, t.cls)):
                op = t.new
        return op


IDENTITY = RenameMap()


@dataclass(frozen=True)
class PipelineResult:
    model: Model
    renames: RenameMap


def pipeline(model: Model, ts: Sequence[Transformation]) -> PipelineResult:
    """Apply ``ts`` in order, all or nothing. A failing step raises
    TransformationError carrying its 0-based index."""
    steps = []
    current = model
    for i, t in enumerate(ts):
        try:
            nxt = apply(current, t)
        except TransformationError as e:
            raise TransformationError(e.violations, i) from None
        steps.append((current, t))
        current = nxt
    return PipelineResult(current, RenameMap(tuple(steps)))


@dataclass
class TestComparison:
    name: str
    verdict_before: str
    verdict_after: str
    trace_equal: bool
    before: list[str] = field(default_factory=list)  # projected, renamed
    after: list[str] = field(default_factory=list)

    __test__ = False

    @property
    def same(self) -> bool:
        return self.verdict_before == self.verdict_after and self.trace_equal


@dataclass
class RegressionReport:
    model: str
    tests: list[TestComparison]
    before: SuiteReport
    after: SuiteReport

    @property
    def preserved(self) -> bool:
        return all(t.same for t in self.tests)

    def to_json(self, timing: bool = True) -> dict:
        d = {"model": self.model,
             "tests": [{"name": t.name, "verdict": t.verdict_after,
                        "verdict_before": t.verdict_before, "verdict_after": t.verdict_after,
                        "trace_equal": t.trace_equal} for t in self.tests],
             "totals": self.after.totals, "preserved": self.preserved}
        if timing:
            d["wall_ms"] = round((self.before.wall + self.after.wall) * 1000, 3)
        return d


def border_pairs(test: TestCase) -> set[tuple[str, str]]:
    """Sender/receiver pairs a test observes: its trigger and observe steps."""
    msgs = list(test.trigger) + [s.message for s in test.steps if isinstance(s, Observe)]
    return {(m.sender, m.receiver) for m in msgs}


def _projected(trace: list[TraceEntry], pairs: set, rename=None) -> list[str]:
    out = []
    for e in trace:
        if e.is_message() and (e.src, e.dst) in pairs:
            if rename is not None:
                e = replace(e, op=rename(e))
            out.append(show_entry(e))
    return out


def regress(before: Model, after: Model, renames: RenameMap = IDENTITY,
            names: Optional[Sequence[str]] = None, jobs: int = 1) -> RegressionReport:
    """Run the suite on both models and compare verdicts and the border
    projection of traces, with ``before``'s operation names mapped forward."""
    if names is None:
        names = [t.name for t in before.tests]
    with ThreadPoolExecutor(max_workers=2) as pool:
        fb = pool.submit(run_suite, before, names, jobs)
        fa = pool.submit(run_suite, after, names, jobs)
        rb, ra = fb.result(), fa.result()
    comparisons = []
    for t, b, a in zip([before.test(n) for n in names], rb.results, ra.results):
        try:
            classes = {o.name: o.cls for o in instantiate(before, t.fixture).objects}
        except InstantiationError:
            classes = {}

        def rename(e: TraceEntry) -> str:
            cls = classes.get(e.dst)
            return renames.op(cls, e.op) if cls is not None else e.op

        pairs = border_pairs(t)
        pb = _projected(b.trace, pairs, rename)
        pa = _projected(a.trace, pairs)
        comparisons.append(TestComparison(t.name, b.verdict.kind, a.verdict.kind, pb == pa,
                                          pb, pa))
    return RegressionReport(before.name, comparisons, rb, ra)
