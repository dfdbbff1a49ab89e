"""Declarative logic rules: contradictions, incompleteness and generic text.

Rule sets are JSON documents::

    {"blank_threshold": 0.5, "logic_threshold": 0.5,
     "weights": {"contradiction": 0.4, "blank": 0.3, "generic": 0.1},
     "generic_stoplist": ["n/a", "ok", ...],
     "contradictions": [
        {"id": "no_erp_but_vendor",
         "if": {"q": "erp_usage", "op": "equals", "value": "No ERP system used"},
         "conflicts_with": {"q": "primary_erp", "op": "not_blank"},
         "description": "..."}]}

Each response gets a logic score in [0, 1]; 1.0 means no rule fired and
anything below ``logic_threshold`` is suspicious.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence, TypeVar

from ._canon import normalize_label
from .errors import ConfigError, DimensionMismatch
from .ingest import UNKNOWN, CleanResponse, text_answer
from .schema import QuestionKind, SurveySchema

DEFAULT_STOPLIST = frozenset({"n/a", "na", "none", "nothing", "ok", "yes", "no", "don't know", "idk", ""})
OPS = ("equals", "in_set", "is_blank", "not_blank")

T = TypeVar("T")


@dataclass(frozen=True)
class Condition:
    question_id: str
    op: str
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if self.op not in OPS:
            raise ConfigError(f"unknown condition op {self.op!r}")
        object.__setattr__(self, "values", tuple(normalize_label(str(v)) for v in self.values))

    @classmethod
    def equals(cls, qid: str, value: str) -> "Condition":
        return cls(qid, "equals", (value,))

    @classmethod
    def in_set(cls, qid: str, values) -> "Condition":
        return cls(qid, "in_set", tuple(values))

    @classmethod
    def is_blank(cls, qid: str) -> "Condition":
        return cls(qid, "is_blank")

    @classmethod
    def not_blank(cls, qid: str) -> "Condition":
        return cls(qid, "not_blank")

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"q": self.question_id, "op": self.op}
        if self.op == "equals":
            doc["value"] = self.values[0]
        elif self.op == "in_set":
            doc["values"] = list(self.values)
        return doc

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Condition":
        op = doc.get("op")
        if op == "equals":
            if "value" not in doc:
                raise ConfigError(f"equals condition on {doc.get('q')!r} needs a value")
            values = (doc["value"],)
        elif op == "in_set":
            values = tuple(doc.get("values") or ())
        else:
            values = ()
        return cls(str(doc["q"]), op, values)


@dataclass(frozen=True)
class ContradictionRule:
    id: str
    antecedent: Condition
    conflicting: Condition
    description: str = ""


@dataclass(frozen=True)
class RuleSet:
    contradictions: tuple[ContradictionRule, ...] = ()
    blank_threshold: float = 0.5
    logic_threshold: float = 0.5
    generic_stoplist: frozenset[str] = DEFAULT_STOPLIST
    w_contradiction: float = 0.4
    w_blank: float = 0.3
    w_generic: float = 0.1

    def __post_init__(self):
        for name in ("blank_threshold", "logic_threshold"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if min(self.w_contradiction, self.w_blank, self.w_generic) < 0:
            raise ConfigError("rule weights must be non-negative")
        object.__setattr__(self, "generic_stoplist", frozenset(normalize_label(s) for s in self.generic_stoplist))

    def check_against(self, schema: SurveySchema) -> None:
        """Raise :class:`ConfigError` if a rule names a question the schema lacks (or a PII one)."""
        usable = {q.id for q in schema.non_pii}
        for rule in self.contradictions:
            for cond in (rule.antecedent, rule.conflicting):
                if cond.question_id not in usable:
                    raise ConfigError(f"rule {rule.id!r} references unknown question {cond.question_id!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "blank_threshold": self.blank_threshold,
            "logic_threshold": self.logic_threshold,
            "weights": {"contradiction": self.w_contradiction, "blank": self.w_blank, "generic": self.w_generic},
            "generic_stoplist": sorted(self.generic_stoplist),
            "contradictions": [
                {
                    "id": r.id,
                    "if": r.antecedent.to_dict(),
                    "conflicts_with": r.conflicting.to_dict(),
                    "description": r.description,
                }
                for r in self.contradictions
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any], schema: SurveySchema | None = None) -> "RuleSet":
        try:
            weights = doc.get("weights", {})
            rules = tuple(
                ContradictionRule(
                    id=str(r["id"]),
                    antecedent=Condition.from_dict(r["if"]),
                    conflicting=Condition.from_dict(r["conflicts_with"]),
                    description=str(r.get("description", "")),
                )
                for r in doc.get("contradictions", ())
            )
            ruleset = cls(
                contradictions=rules,
                blank_threshold=float(doc.get("blank_threshold", 0.5)),
                logic_threshold=float(doc.get("logic_threshold", 0.5)),
                generic_stoplist=frozenset(doc.get("generic_stoplist", DEFAULT_STOPLIST)),
                w_contradiction=float(weights.get("contradiction", 0.4)),
                w_blank=float(weights.get("blank", 0.3)),
                w_generic=float(weights.get("generic", 0.1)),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed rule set: {exc!r}") from exc
        if schema is not None:
            ruleset.check_against(schema)
        return ruleset


def load_rules(path: str | Path, schema: SurveySchema | None = None) -> RuleSet:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return RuleSet.from_dict(doc, schema)


@dataclass(frozen=True)
class LogicReport:
    respondent_id: str
    fired_rules: list[str]
    blank_fraction: float
    generic_count: int
    logic_score: float
    suspicious: bool
    blank_flag: bool = False

    @property
    def reasons(self) -> list[str]:
        """Fired rule ids plus ``incomplete`` / ``generic_text`` markers."""
        out = list(self.fired_rules)
        if self.blank_flag:
            out.append("incomplete")
        if self.generic_count:
            out.append("generic_text")
        return out


def _values_of(clean: CleanResponse, qid: str) -> list[str]:
    value = clean.answers.get(qid)
    if value is None:
        return []
    if isinstance(value, list):
        return [str(v) for v in value]
    return [normalize_label(str(value))]


def _blank(clean: CleanResponse, qid: str) -> bool:
    if qid in clean.missing:
        return True
    value = clean.answers.get(qid)
    return value in (None, UNKNOWN, [UNKNOWN], [], "")


def eval_condition(clean: CleanResponse, cond: Condition) -> bool:
    qid = cond.question_id
    if qid not in clean.answers and qid not in clean.missing:
        raise ConfigError(f"condition references unknown question {qid!r}")
    if cond.op == "is_blank":
        return _blank(clean, qid)
    if cond.op == "not_blank":
        return not _blank(clean, qid)
    if _blank(clean, qid):
        return False
    return any(v in cond.values for v in _values_of(clean, qid))


def check_contradictions(clean: CleanResponse, ruleset: RuleSet) -> list[str]:
    return [
        rule.id
        for rule in ruleset.contradictions
        if eval_condition(clean, rule.antecedent) and eval_condition(clean, rule.conflicting)
    ]


def blank_fraction(clean: CleanResponse, schema: SurveySchema) -> float:
    ids = [q.id for q in schema.non_pii]
    return sum(qid in clean.missing for qid in ids) / len(ids)


def generic_text_count(clean: CleanResponse, schema: SurveySchema, stoplist=DEFAULT_STOPLIST) -> int:
    """Free-text answers that are empty or, once normalized, in ``stoplist``."""
    count = 0
    for q in schema.of_kind(QuestionKind.FREE_TEXT):
        canon = normalize_label(text_answer(clean, q.id))
        if not canon or canon in stoplist:
            count += 1
    return count


def combine_logic_score(n_fired: int, blank_flag: bool, generic_count: int, ruleset: RuleSet) -> float:
    penalty = ruleset.w_contradiction * n_fired + ruleset.w_blank * blank_flag + ruleset.w_generic * generic_count
    return min(1.0, max(0.0, 1.0 - penalty))


def logic_score(clean: CleanResponse, schema: SurveySchema, ruleset: RuleSet) -> LogicReport:
    fired = check_contradictions(clean, ruleset)
    bf = blank_fraction(clean, schema)
    blank_flag = bf > ruleset.blank_threshold
    generic = generic_text_count(clean, schema, ruleset.generic_stoplist)
    score = combine_logic_score(len(fired), blank_flag, generic, ruleset)
    return LogicReport(
        respondent_id=clean.respondent_id,
        fired_rules=fired,
        blank_fraction=bf,
        generic_count=generic,
        logic_score=score,
        suspicious=score < ruleset.logic_threshold,
        blank_flag=blank_flag,
    )


def partition_by_logic(reports: Sequence[LogicReport], items: Sequence[T]) -> tuple[list[T], list[T]]:
    """Split ``items`` into (passed, suspicious) using the aligned logic reports.

    Items carrying a ``respondent_id`` attribute must match their report's id.
    """
    if len(reports) != len(items):
        raise DimensionMismatch(f"{len(reports)} reports for {len(items)} items")
    passed, suspicious = [], []
    for report, item in zip(reports, items):
        rid = getattr(item, "respondent_id", report.respondent_id)
        if rid != report.respondent_id:
            raise DimensionMismatch(f"report {report.respondent_id!r} is aligned with item {rid!r}")
        (suspicious if report.suspicious else passed).append(item)
    return passed, suspicious
