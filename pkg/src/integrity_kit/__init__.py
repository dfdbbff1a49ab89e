"""Survey response integrity analytics.

Screens out low-effort and fake survey responses.  Declarative logic rules
and a deterministic text-effort score feed a from-scratch classifier
(random forest, logistic regression or Newton-boosted trees).
"""
from .errors import ConfigError, DataError, DimensionMismatch, IntegrityKitError
from .evaluation import (
    ClassMetrics,
    ConfusionMatrix,
    EvalReport,
    ImportanceRanking,
    class_metrics,
    confusion,
    gini_importance,
    stratified_split,
)
from .ingest import CleanResponse, Dataset, EncodingMap, normalize_label
from .pipeline import PipelineConfig, TrainedModel, judge, run_filter, run_training, segment
from .rules import Condition, ContradictionRule, LogicReport, RuleSet, logic_score
from .schema import QuestionKind, QuestionSpec, RawResponse, SurveySchema, validate_response, validate_schema

__version__ = "0.1.0"

__all__ = [
    "ClassMetrics", "Condition", "ConfigError", "ConfusionMatrix", "ContradictionRule",
    "CleanResponse", "DataError", "Dataset", "DimensionMismatch", "EncodingMap", "EvalReport",
    "ImportanceRanking", "IntegrityKitError", "LogicReport", "PipelineConfig", "QuestionKind",
    "QuestionSpec", "RawResponse", "RuleSet", "SurveySchema", "TrainedModel", "class_metrics",
    "confusion", "gini_importance", "judge", "logic_score", "normalize_label", "run_filter",
    "run_training", "segment", "stratified_split", "validate_response", "validate_schema",
]
