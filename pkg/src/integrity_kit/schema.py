"""Survey instrument and raw response data model.

A :class:`SurveySchema` is user data loaded from JSON::

    {"version": "1",
     "questions": [{"id": "erp_type", "text": "Primary ERP", "kind": "single_choice",
                    "values": ["SAP", "Oracle ERP"], "pii": false}, ...]}

Question order is significant: it fixes the column order of every encoded
dataset built from the schema.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Union

from ._canon import normalize_label
from .errors import ConfigError

# text | choice | choice-list | integer; an absent answer is a missing key or None
AnswerValue = Union[str, list, int, None]


class QuestionKind(str, Enum):
    SINGLE_CHOICE = "single_choice"
    MULTI_CHOICE = "multi_choice"
    LIKERT = "likert"
    FREE_TEXT = "free_text"

    @property
    def is_choice(self) -> bool:
        return self in (QuestionKind.SINGLE_CHOICE, QuestionKind.MULTI_CHOICE)


@dataclass(frozen=True)
class QuestionSpec:
    id: str
    text: str
    kind: QuestionKind
    values: tuple[str, ...] = ()
    likert: tuple[int, int] | None = None
    pii: bool = False

    def canonical_values(self) -> tuple[str, ...]:
        return tuple(normalize_label(v) for v in self.values)


@dataclass(frozen=True)
class SurveySchema:
    questions: tuple[QuestionSpec, ...]
    version: str = "1"

    @property
    def ids(self) -> list[str]:
        return [q.id for q in self.questions]

    @property
    def non_pii(self) -> list[QuestionSpec]:
        return [q for q in self.questions if not q.pii]

    def question(self, qid: str) -> QuestionSpec:
        for q in self.questions:
            if q.id == qid:
                return q
        raise KeyError(qid)

    def __contains__(self, qid: object) -> bool:
        return any(q.id == qid for q in self.questions)

    def of_kind(self, kind: QuestionKind, *, include_pii: bool = False) -> list[QuestionSpec]:
        return [q for q in self.questions if q.kind is kind and (include_pii or not q.pii)]


@dataclass
class RawResponse:
    respondent_id: str
    answers: dict[str, AnswerValue] = field(default_factory=dict)


@dataclass(frozen=True)
class Violation:
    """One problem found in a schema or a response.

    ``question_id`` is ``None`` for schema-wide problems.
    """

    question_id: str | None
    rule: str
    message: str


def validate_schema(schema: SurveySchema) -> list[Violation]:
    violations = []
    seen: set[str] = set()
    for q in schema.questions:
        if not q.id:
            violations.append(Violation(q.id, "empty_id", "question id must be non-empty"))
        elif q.id in seen:
            violations.append(Violation(q.id, "duplicate_id", f"question id {q.id!r} appears more than once"))
        seen.add(q.id)

        if q.kind is QuestionKind.LIKERT:
            if q.likert is None:
                violations.append(Violation(q.id, "likert_range", "likert question needs a lo/hi range"))
            elif q.likert[0] > q.likert[1]:
                lo, hi = q.likert
                violations.append(Violation(q.id, "likert_range", f"likert range lo={lo} exceeds hi={hi}"))
        if q.kind.is_choice:
            if not q.values:
                violations.append(Violation(q.id, "empty_values", "choice question needs allowed values"))
            canon = q.canonical_values()
            dupes = sorted({v for v in canon if canon.count(v) > 1})
            if dupes:
                violations.append(Violation(q.id, "duplicate_value", f"values collide after normalization: {dupes}"))

    if not schema.non_pii:
        violations.append(Violation(None, "no_non_pii", "schema needs at least one non-PII question"))
    return violations


def validate_response(schema: SurveySchema, raw: RawResponse) -> list[Violation]:
    """Structural problems in one response.

    Answers that only differ from the vocabulary by case, spacing or edge
    punctuation are accepted; absent answers are always legal here.
    """
    issues = []
    known = {q.id: q for q in schema.questions}
    for qid, value in raw.answers.items():
        q = known.get(qid)
        if q is None:
            issues.append(Violation(qid, "unknown_question", f"{qid!r} is not in the schema"))
            continue
        if value is None:
            continue
        if q.kind is QuestionKind.LIKERT:
            if isinstance(value, bool) or not isinstance(value, int):
                issues.append(Violation(qid, "likert_type", f"expected an integer, got {value!r}"))
            elif not q.likert[0] <= value <= q.likert[1]:
                lo, hi = q.likert
                issues.append(Violation(qid, "likert_range", f"{value} outside {lo}..{hi}"))
        elif q.kind.is_choice:
            allowed = set(q.canonical_values())
            picks = value if isinstance(value, list) else [value]
            if q.kind is QuestionKind.SINGLE_CHOICE and isinstance(value, list) and len(value) > 1:
                issues.append(Violation(qid, "choice_type", "single-choice question got several answers"))
            for v in picks:
                if not isinstance(v, str):
                    issues.append(Violation(qid, "choice_type", f"expected text, got {v!r}"))
                elif normalize_label(v) and normalize_label(v) not in allowed:
                    issues.append(Violation(qid, "choice_vocabulary", f"{v!r} is not an allowed value"))
        elif not isinstance(value, str):
            issues.append(Violation(qid, "text_type", f"expected text, got {value!r}"))
    return issues


def schema_from_dict(doc: dict[str, Any]) -> SurveySchema:
    try:
        questions = []
        for item in doc["questions"]:
            likert = item.get("likert")
            questions.append(
                QuestionSpec(
                    id=str(item["id"]),
                    text=str(item.get("text", "")),
                    kind=QuestionKind(item["kind"]),
                    values=tuple(item.get("values") or ()),
                    likert=(int(likert["lo"]), int(likert["hi"])) if likert else None,
                    pii=bool(item.get("pii", False)),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed schema document: {exc}") from exc
    return SurveySchema(tuple(questions), str(doc.get("version", "1")))


def schema_to_dict(schema: SurveySchema) -> dict[str, Any]:
    questions = []
    for q in schema.questions:
        item: dict[str, Any] = {"id": q.id, "text": q.text, "kind": q.kind.value, "pii": q.pii}
        if q.values:
            item["values"] = list(q.values)
        if q.likert is not None:
            item["likert"] = {"lo": q.likert[0], "hi": q.likert[1]}
        questions.append(item)
    return {"version": schema.version, "questions": questions}


def load_schema(path: str | Path, *, strict: bool = True) -> SurveySchema:
    """Read a schema JSON file; with ``strict`` any violation raises :class:`ConfigError`."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    schema = schema_from_dict(doc)
    if strict:
        problems = validate_schema(schema)
        if problems:
            listing = "; ".join(f"{v.question_id}: {v.message}" for v in problems)
            raise ConfigError(f"{path}: invalid schema: {listing}")
    return schema
