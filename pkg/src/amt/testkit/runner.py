"""Running model tests: fixture, trigger, observations, assertions, oracle."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from amt.config import Configuration
from amt.executor.runtime import (
    DEFAULT_BUDGET, ExecutionError, InstantiationError, Trace, instantiate, make_event,
    run_script, replay, trace_to_json,
)
from amt.expr import Name, lit, walk
from amt.model import Assert, Model, ModelError, Observe, TestCase
from amt.ocl.evaluate import _Evaluator, object_bindings
from amt.ocl.invariants import check_invariants
from amt.ocl.values import UNDEFINED
from amt.syntax.printer import format_expr, format_literal
from amt.testkit.conformance import ObservationMismatch, check_conformance, projection
from amt.testkit.matching import match_od

PASS, FAIL, ERROR = "pass", "fail", "error"
EACH_STEP, FINAL = "each-step", "final"


@dataclass(frozen=True)
class AssertionFalse:
    expr: str
    at: str
    bindings: tuple[tuple[str, str], ...]  # referenced object -> its state

    kind = "assertion_false"

    def to_json(self) -> dict:
        return {"kind": self.kind, "expr": self.expr, "at": self.at,
                "bindings": dict(self.bindings)}


@dataclass(frozen=True)
class OracleUnmatched:
    partial: tuple[tuple[str, str], ...]  # best partial mapping, pattern -> object

    kind = "oracle_unmatched"

    def to_json(self) -> dict:
        return {"kind": self.kind, "partial": dict(self.partial)}


@dataclass(frozen=True)
class InvariantViolated:
    object: str
    invariant: str
    at: str

    kind = "invariant_violated"

    def to_json(self) -> dict:
        return {"kind": self.kind, "object": self.object, "invariant": self.invariant,
                "at": self.at}


FailReason = Any  # ObservationMismatch | AssertionFalse | OracleUnmatched | InvariantViolated


@dataclass(frozen=True)
class Verdict:
    kind: str  # pass | fail | error
    reasons: tuple[FailReason, ...] = ()
    cause: Optional[str] = None

    def to_json(self) -> list:
        if self.kind == ERROR:
            return [{"kind": "error", "cause": self.cause}]
        return [r.to_json() for r in self.reasons]


@dataclass
class TestResult:
    name: str
    verdict: Verdict
    trace: Trace = field(default_factory=list)
    duration: float = 0.0  # seconds

    __test__ = False

    def to_json(self, timing: bool = True) -> dict:
        d = {"name": self.name, "verdict": self.verdict.kind,
             "reasons": self.verdict.to_json(), "trace": trace_to_json(self.trace)}
        if timing:
            d["ms"] = round(self.duration * 1000, 3)
        return d


class _TestError(Exception):
    pass


def _span(x) -> str:
    return str(x.span) if x.span is not None else "?"


def run_test(model: Model, test: TestCase, check: str = FINAL,
             budget: int = DEFAULT_BUDGET) -> TestResult:
    """Run one test on a fresh configuration; reasons accumulate."""
    t0 = time.perf_counter()
    trace: Trace = []
    try:
        reasons = _run(model, test, check, budget, trace)
        verdict = Verdict(FAIL, tuple(reasons)) if reasons else Verdict(PASS)
    except _TestError as e:
        verdict = Verdict(ERROR, cause=str(e))
    return TestResult(test.name, verdict, trace, time.perf_counter() - t0)


def _run(model: Model, test: TestCase, check: str, budget: int, trace: Trace) -> list:
    try:
        start = instantiate(model, test.fixture)
    except InstantiationError as e:
        raise _TestError(f"instantiation failed: {e}") from None
    reasons: list = []
    seen_violations: set = set()

    def invariants(config: Configuration) -> None:
        for v in check_invariants(model, config):
            key = (v.oid, id(v.invariant))
            if key not in seen_violations:
                seen_violations.add(key)
                reasons.append(InvariantViolated(v.object_name, format_expr(v.invariant),
                                                 _span(v.invariant)))

    try:
        events = [make_event(model, start, m) for m in test.trigger]
        final, t = run_script(model, start, events, budget,
                              invariants if check == EACH_STEP else None)
    except ExecutionError as e:
        trace.extend(e.trace)
        raise _TestError(f"{type(e).__name__}: {e}") from None
    except ModelError as e:
        raise _TestError(str(e)) from None
    trace.extend(t)

    observes = [s.message for s in test.steps if isinstance(s, Observe)]
    mismatch: Optional[ObservationMismatch] = check_conformance(observes, trace)
    idx = projection(trace, {(m.sender, m.receiver) for m in observes})

    names = object_bindings(final)
    seen_observes = 0
    for step in test.steps:
        if isinstance(step, Observe):
            seen_observes += 1
            continue
        assert isinstance(step, Assert)
        config = final
        if seen_observes and mismatch is None:
            # state at the moment the preceding observation was made
            config = replay(start, trace, idx[seen_observes - 1] + 1)
        value = _Evaluator(model, config).eval(step.expr, names)
        if value is UNDEFINED:
            raise _TestError(f"assertion at {_span(step)} is undefined")
        if value is not True:
            used = sorted({e.name for e in walk(step.expr)
                           if isinstance(e, Name) and e.name in names})
            reasons.append(AssertionFalse(format_expr(step.expr), _span(step),
                                          tuple((n, _describe(config, n)) for n in used)))
    if mismatch is not None:
        reasons.append(mismatch)
    if test.oracle is not None:
        anchors = {n: oid for n, oid in final.by_name.items()}
        m = match_od(model, test.oracle, final, anchors)
        if not m:
            reasons.append(OracleUnmatched(tuple((p, final.obj(o).name)
                                                 for p, o in m.mapping)))
    invariants(final)
    return reasons


@dataclass
class SuiteReport:
    model: str
    results: list[TestResult]
    wall: float = 0.0  # seconds

    @property
    def totals(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, ERROR: 0}
        for r in self.results:
            out[r.verdict.kind] += 1
        return out

    @property
    def ok(self) -> bool:
        return all(r.verdict.kind == PASS for r in self.results)

    def summary(self) -> str:
        t = self.totals
        return f"{t[PASS]} passed, {t[FAIL]} failed, {t[ERROR]} errors"

    def to_json(self, timing: bool = True) -> dict:
        d: dict[str, Any] = {"model": self.model,
                             "tests": [r.to_json(timing) for r in self.results],
                             "totals": self.totals}
        if timing:
            d["wall_ms"] = round(self.wall * 1000, 3)
        return d


def run_suite(model: Model, names: Optional[Sequence[str]] = None, jobs: int = 1,
              check: str = FINAL, budget: int = DEFAULT_BUDGET) -> SuiteReport:
    """Run tests (all by default) in declaration order; each test gets its own
    configuration, so ``jobs`` only affects wall time."""
    t0 = time.perf_counter()
    tests = list(model.tests) if names is None else [model.test(n) for n in names]
    # warm shared lazy indexes before threads read them
    for c in model.classes:
        model.index.is_subclass(c.name, c.name)
    if jobs <= 1 or len(tests) <= 1:
        results = [run_test(model, t, check, budget) for t in tests]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: run_test(model, t, check, budget), tests))
    return SuiteReport(model.name, results, time.perf_counter() - t0)


def _describe(config: Configuration, name: str) -> str:
    o = config.obj(config.by_name[name])
    parts = [f"{k}={format_literal(lit(v))}" for k, v in o.attrs]
    if o.state is not None:
        parts.append(f"state={o.state}")
    return f"{o.cls}({', '.join(parts)})"
