"""Refactoring transformations, pipelines and regression checks."""

from amt.evolution.regress import (
    IDENTITY, PipelineResult, RegressionReport, RenameMap, pipeline, regress,
)
from amt.evolution.transform import (
    ConditionViolation, PullUpAttribute, PullUpOperation, RenameAttribute, RenameClass,
    RenameOperation, Transformation, TransformationError, applicable_sites, apply,
    candidate_sites, check_conditions, parse_transformations,
)

__all__ = [
    "IDENTITY", "PipelineResult", "RegressionReport", "RenameMap", "pipeline", "regress",
    "ConditionViolation", "PullUpAttribute", "PullUpOperation", "RenameAttribute",
    "RenameClass", "RenameOperation", "Transformation", "TransformationError", "apply",
    "applicable_sites", "candidate_sites", "check_conditions", "parse_transformations",
]
