"""End-to-end orchestration: preprocess -> rules -> text scores -> features -> model.

:func:`run_training` fits and evaluates a model; :func:`judge` is the single
scoring path used by batch filtering and by the HTTP validator, so both
always agree on a response's verdict.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import jsonfmt
from .errors import ConfigError, DataError, DimensionMismatch
from .evaluation import EvalReport, ImportanceRanking, evaluate, gini_importance, stratified_indices
from .ingest import (
    CleanResponse,
    Dataset,
    EncodingMap,
    encode_dataset,
    fit_encoding,
    preprocess,
    responses_to_csv,
)
from .models import Classifier, ForestConfig, GbtConfig, LogRegConfig, classifier_from_dict, train
from .rules import LogicReport, RuleSet, logic_score
from .schema import QuestionKind, RawResponse, SurveySchema
from .textscore import TextScoreConfig, TextScoreReport, score_texts

log = logging.getLogger(__name__)

SCORE_FEATURES = ("blank_fraction", "logic_score", "coherence", "length_score", "vocab_score")
VERDICT_COLUMNS = ("verdict", "prob_fake", "logic_score", "reasons")
MODEL_KINDS = {"rf": "forest", "forest": "forest", "logreg": "logreg", "gbt": "gbt"}
_CONFIG_TYPES = {"forest": ForestConfig, "logreg": LogRegConfig, "gbt": GbtConfig}


@dataclass(frozen=True)
class PipelineConfig:
    model_kind: str = "forest"
    model_config: Any = None  # ForestConfig / LogRegConfig / GbtConfig; None -> defaults
    decision_threshold: float = 0.5
    drop_suspicious_pre_model: bool = False
    include_scores: bool = True  # append logic/text score columns to the encoded answers
    segment_by: tuple[str, ...] = ()
    test_fraction: float = 0.2
    seed: int = 0
    n_jobs: int = 1
    text: TextScoreConfig = TextScoreConfig()

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.model_kind!r}")
        object.__setattr__(self, "model_kind", MODEL_KINDS[self.model_kind])
        if self.model_config is None:
            cfg_type = _CONFIG_TYPES[self.model_kind]
            cfg = cfg_type(seed=self.seed) if cfg_type is ForestConfig else cfg_type()
            object.__setattr__(self, "model_config", cfg)

    def check_against(self, schema: SurveySchema) -> None:
        for qid in self.segment_by:
            if qid not in schema:
                raise ConfigError(f"segment_by references unknown question {qid!r}")


def load_pipeline_config(path: str | Path) -> tuple[PipelineConfig, dict[str, str]]:
    """Read a pipeline config JSON.

    Returns the config and the referenced file paths (keys ``schema``,
    ``rules``, ``model``; any may be absent)::

        {"schema": "schema.json", "rules": "rules.json", "model": "model.json",
         "model_kind": "rf", "model_config": {"n_trees": 100, "max_depth": 5},
         "decision_threshold": 0.5, "drop_suspicious_pre_model": false,
         "include_scores": true, "segment_by": ["primary_erp"], "seed": 42}
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    paths = {k: doc.pop(k) for k in ("schema", "rules", "model") if k in doc}
    kind = MODEL_KINDS.get(doc.get("model_kind", "forest"))
    if kind is None:
        raise ConfigError(f"unknown model kind {doc.get('model_kind')!r}")
    try:
        if "model_config" in doc:
            doc["model_config"] = _CONFIG_TYPES[kind](**doc["model_config"])
        if "text" in doc:
            doc["text"] = TextScoreConfig(**doc["text"])
        if "segment_by" in doc:
            doc["segment_by"] = tuple(doc["segment_by"])
        return PipelineConfig(**doc), paths
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass
class TrainedModel:
    """A classifier plus everything needed to turn raw responses into its inputs."""

    classifier: Classifier
    feature_names: list[str]
    encoding: EncodingMap
    ruleset: RuleSet
    include_scores: bool = True
    decision_threshold: float = 0.5
    text: TextScoreConfig = TextScoreConfig()
    schema_version: str = ""

    @property
    def kind(self) -> str:
        return self.classifier.kind

    def to_dict(self) -> dict:
        doc = self.classifier.to_dict()
        doc.update(
            feature_names=list(self.feature_names),
            encoding=self.encoding.to_dict(),
            rules=self.ruleset.to_dict(),
            include_scores=self.include_scores,
            decision_threshold=self.decision_threshold,
            text=asdict(self.text),
            schema_version=self.schema_version,
        )
        return doc

    def dumps(self) -> bytes:
        return (jsonfmt.dumps(self.to_dict()) + "\n").encode("utf-8")

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainedModel":
        try:
            return cls(
                classifier=classifier_from_dict(doc),
                feature_names=list(doc["feature_names"]),
                encoding=EncodingMap.from_dict(doc["encoding"]),
                ruleset=RuleSet.from_dict(doc["rules"]),
                include_scores=bool(doc["include_scores"]),
                decision_threshold=float(doc["decision_threshold"]),
                text=TextScoreConfig(**doc.get("text", {})),
                schema_version=str(doc.get("schema_version", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed model document: {exc!r}") from exc

    @classmethod
    def loads(cls, data: bytes | str) -> "TrainedModel":
        try:
            return cls.from_dict(json.loads(data))
        except json.JSONDecodeError as exc:
            raise DataError(f"model file is not valid JSON ({exc})") from exc


def analyze(cleans: Sequence[CleanResponse], schema: SurveySchema, ruleset: RuleSet,
            text: TextScoreConfig = TextScoreConfig()) -> tuple[list[LogicReport], list[TextScoreReport]]:
    logic = [logic_score(c, schema, ruleset) for c in cleans]
    texts = [score_texts(c, schema, ruleset.generic_stoplist, text) for c in cleans]
    return logic, texts


def assemble_features(
    schema: SurveySchema,
    encoding: EncodingMap,
    clean_responses: Sequence[CleanResponse],
    logic_reports: Sequence[LogicReport],
    text_reports: Sequence[TextScoreReport],
    labels: Sequence[int] | None = None,
    include_scores: bool = True,
) -> Dataset:
    """Encoded answers followed by the five score columns named in ``SCORE_FEATURES``."""
    base = encode_dataset(schema, encoding, clean_responses, labels)
    if not include_scores:
        return base
    if not len(clean_responses) == len(logic_reports) == len(text_reports):
        raise DimensionMismatch("responses, logic reports and text reports differ in length")
    scores = np.zeros((base.n, len(SCORE_FEATURES)))
    for i, (c, lr, tr) in enumerate(zip(clean_responses, logic_reports, text_reports)):
        if not c.respondent_id == lr.respondent_id == tr.respondent_id:
            raise DimensionMismatch(f"row {i}: ids {c.respondent_id!r}/{lr.respondent_id!r}/{tr.respondent_id!r} differ")
        scores[i] = (lr.blank_fraction, lr.logic_score, tr.coherence, tr.length_score, tr.vocab_score)
    return Dataset(base.feature_names + list(SCORE_FEATURES), np.hstack([base.rows, scores]), base.labels, base.row_ids)


def _features(trained: TrainedModel, schema: SurveySchema, cleans, logic, texts) -> Dataset:
    ds = assemble_features(schema, trained.encoding, cleans, logic, texts, include_scores=trained.include_scores)
    if ds.feature_names != trained.feature_names:
        raise ConfigError("model features do not match this schema/encoding")
    return ds


def _importances(classifier: Classifier, names: Sequence[str]) -> ImportanceRanking:
    if hasattr(classifier, "trees"):
        return gini_importance(classifier, names)
    return ImportanceRanking(())


def run_training(
    schema: SurveySchema,
    raws: Sequence[RawResponse],
    labels: Sequence[int],
    ruleset: RuleSet,
    config: PipelineConfig = PipelineConfig(),
) -> tuple[TrainedModel, EvalReport]:
    """Stratified split, encoding fitted on the training part only, train, evaluate on the test part."""
    if labels is None or len(labels) != len(raws):
        raise DimensionMismatch("training needs one label per response")
    ruleset.check_against(schema)
    labels = np.asarray(labels, dtype=int)
    warnings = []
    for cls, name in ((0, "genuine"), (1, "fake")):
        count = int(np.sum(labels == cls))
        if count < 2:
            warnings.append(f"only {count} {name} sample(s); metrics for that class use 0/0 -> 0")
    for w in warnings:
        log.warning(w)

    cleans = preprocess(raws, schema)
    train_idx, test_idx = stratified_indices(labels, config.test_fraction, config.seed)
    encoding = fit_encoding(schema, [cleans[i] for i in train_idx])
    logic, texts = analyze(cleans, schema, ruleset, config.text)
    full = assemble_features(schema, encoding, cleans, logic, texts, labels, config.include_scores)
    train_ds, test_ds = full.subset(train_idx), full.subset(test_idx)

    classifier = train(config.model_kind, train_ds, config.model_config, n_jobs=config.n_jobs)
    trained = TrainedModel(
        classifier=classifier,
        feature_names=full.feature_names,
        encoding=encoding,
        ruleset=ruleset,
        include_scores=config.include_scores,
        decision_threshold=config.decision_threshold,
        text=config.text,
        schema_version=schema.version,
    )
    preds = (classifier.predict_proba(test_ds.rows) >= config.decision_threshold).astype(int)
    report = evaluate(config.model_kind, preds, test_ds.labels, _importances(classifier, full.feature_names), warnings)
    return trained, report


@dataclass(frozen=True)
class Verdict:
    respondent_id: str
    verdict: str  # "genuine" | "fake"
    prob_fake: float
    logic_score: float
    reasons: list[str]
    logic: LogicReport | None = None
    text: TextScoreReport | None = None

    @property
    def flagged(self) -> bool:
        return self.verdict == "fake"

    def payload(self) -> dict:
        return {"verdict": self.verdict, "prob_fake": self.prob_fake, "logic_score": self.logic_score,
                "reasons": list(self.reasons)}

    def csv_fields(self) -> dict[str, str]:
        return {
            "verdict": self.verdict,
            "prob_fake": jsonfmt.format_float(self.prob_fake, None),
            "logic_score": jsonfmt.format_float(self.logic_score, None),
            "reasons": ";".join(self.reasons),
        }


def judge(
    trained: TrainedModel,
    schema: SurveySchema,
    ruleset: RuleSet,
    raws: Sequence[RawResponse],
    drop_suspicious: bool = False,
) -> list[Verdict]:
    """Score raw responses: logic rules, text scores, then the classifier.

    A response is flagged when the model's fake probability reaches the
    decision threshold, or, with ``drop_suspicious``, when its logic score
    is below the rule set's threshold.  Reasons are recorded either way.
    """
    if not raws:
        return []
    cleans = preprocess(raws, schema)
    logic, texts = analyze(cleans, schema, ruleset, trained.text)
    probs = trained.classifier.predict_proba(_features(trained, schema, cleans, logic, texts).rows)
    out = []
    for raw, lr, tr, p in zip(raws, logic, texts, probs):
        model_flag = bool(p >= trained.decision_threshold)
        reasons = lr.reasons + (["model"] if model_flag else [])
        flagged = model_flag or (drop_suspicious and lr.suspicious)
        out.append(Verdict(raw.respondent_id, "fake" if flagged else "genuine", float(p), lr.logic_score, reasons, lr, tr))
    return out


def evaluate_model(trained: TrainedModel, schema: SurveySchema, raws: Sequence[RawResponse],
                   labels: Sequence[int]) -> EvalReport:
    """Score a labeled corpus with an already trained model (model verdicts only, no rule pre-drop)."""
    verdicts = judge(trained, schema, trained.ruleset, raws)
    preds = [int(v.prob_fake >= trained.decision_threshold) for v in verdicts]
    return evaluate(trained.kind, preds, labels, _importances(trained.classifier, trained.feature_names))


@dataclass
class FilterOutcome:
    retained: list[str] = field(default_factory=list)
    # (respondent id, reasons, prob_fake, logic_score)
    flagged: list[tuple[str, list[str], float, float]] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)


def run_filter(schema: SurveySchema, raws: Sequence[RawResponse], model: TrainedModel, ruleset: RuleSet,
               config: PipelineConfig = PipelineConfig()) -> FilterOutcome:
    ruleset.check_against(schema)
    verdicts = judge(model, schema, ruleset, raws, config.drop_suspicious_pre_model)
    outcome = FilterOutcome(verdicts=verdicts)
    for v in verdicts:
        if v.flagged:
            outcome.flagged.append((v.respondent_id, v.reasons, v.prob_fake, v.logic_score))
        else:
            outcome.retained.append(v.respondent_id)
    return outcome


def filter_csvs(schema: SurveySchema, raws: Sequence[RawResponse], outcome: FilterOutcome,
                labels: Sequence[int] | None = None) -> tuple[bytes, bytes]:
    """(retained, flagged) CSVs: the input columns plus verdict, prob_fake, logic_score, reasons."""
    parts = {True: ([], [], []), False: ([], [], [])}
    for i, (raw, v) in enumerate(zip(raws, outcome.verdicts)):
        rows, labs, extra = parts[v.flagged]
        rows.append(raw)
        extra.append(v.csv_fields())
        if labels is not None:
            labs.append(labels[i])
    out = []
    for key in (False, True):
        rows, labs, extra = parts[key]
        out.append(responses_to_csv(schema, rows, labs if labels is not None else None,
                                    extra=extra, extra_columns=VERDICT_COLUMNS))
    return out[0], out[1]


def segment(retained: Sequence[CleanResponse], segment_by: Sequence[str],
            schema: SurveySchema | None = None) -> dict[str, dict[str, int]]:
    """Count canonical answer values per field among retained responses; blanks count as ``unknown``."""
    report: dict[str, dict[str, int]] = {}
    for qid in segment_by:
        if schema is not None:
            if qid not in schema:
                raise ConfigError(f"unknown segment field {qid!r}")
            if schema.question(qid).kind not in (QuestionKind.SINGLE_CHOICE, QuestionKind.LIKERT):
                raise ConfigError(f"segment field {qid!r} must be single-choice or Likert")
        counts: dict[str, int] = {}
        for c in retained:
            value = "unknown" if qid in c.missing else str(c.answers.get(qid, "unknown"))
            counts[value] = counts.get(value, 0) + 1
        report[qid] = dict(sorted(counts.items()))
    return report
