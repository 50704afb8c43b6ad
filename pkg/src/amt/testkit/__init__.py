"""Executable model tests: matching, conformance, running and reporting."""

from amt.testkit.conformance import ObservationMismatch, check_conformance
from amt.testkit.matching import MatchResult, match_od
from amt.testkit.runner import (
    EACH_STEP, ERROR, FAIL, FINAL, PASS, AssertionFalse, InvariantViolated, OracleUnmatched,
    SuiteReport, TestResult, Verdict, run_suite, run_test,
)

__all__ = [
    "ObservationMismatch", "check_conformance", "MatchResult", "match_od", "EACH_STEP",
    "ERROR", "FAIL", "FINAL", "PASS", "AssertionFalse", "InvariantViolated",
    "OracleUnmatched", "SuiteReport", "TestResult", "Verdict", "run_suite", "run_test",
]
