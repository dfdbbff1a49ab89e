"""Response ingestion: CSV parsing, PII removal, normalization, imputation and label encoding."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._canon import normalize_label
from .errors import DataError, DimensionMismatch
from .schema import AnswerValue, QuestionKind, RawResponse, SurveySchema

log = logging.getLogger(__name__)

UNKNOWN = "unknown"
LABEL_COLUMN = "Is_Fake"
ID_COLUMN = "respondent_id"

__all__ = [
    "CleanResponse", "Dataset", "EncodingMap", "normalize_label", "strip_pii",
    "normalize_response", "impute_missing", "preprocess", "fit_encoding",
    "encode_dataset", "parse_responses_csv", "read_labeled_csv", "responses_to_csv",
    "text_answer",
]


@dataclass(frozen=True)
class CleanResponse:
    respondent_id: str
    answers: dict[str, AnswerValue]
    # question ids that were absent or blank before imputation
    missing: frozenset[str] = field(default_factory=frozenset)


def strip_pii(raw: RawResponse, schema: SurveySchema, index: int) -> RawResponse:
    """Drop answers to PII questions and replace the respondent id with ``str(index)``."""
    pii = {q.id for q in schema.questions if q.pii}
    return RawResponse(str(index), {k: v for k, v in raw.answers.items() if k not in pii})


def _is_blank(value: AnswerValue) -> bool:
    if value is None:
        return True
    if isinstance(value, str):
        return not value.strip()
    if isinstance(value, list):
        return all(_is_blank(v) for v in value)
    return False


def normalize_response(raw: RawResponse, schema: SurveySchema) -> CleanResponse:
    """Canonicalize every answer to a known, non-PII question.

    Blank answers, unparseable Likert values and unknown ids are dropped; the
    first two are recorded in ``missing``.
    """
    answers: dict[str, AnswerValue] = {}
    missing = set()
    for q in schema.non_pii:
        value = raw.answers.get(q.id)
        if _is_blank(value):
            missing.add(q.id)
            continue
        if q.kind is QuestionKind.SINGLE_CHOICE:
            if isinstance(value, list):
                value = next(v for v in value if not _is_blank(v))
            canon = normalize_label(str(value))
            if canon:
                answers[q.id] = canon
            else:
                missing.add(q.id)
        elif q.kind is QuestionKind.MULTI_CHOICE:
            picks = value if isinstance(value, list) else [value]
            canon = sorted({normalize_label(str(v)) for v in picks} - {""})
            if canon:
                answers[q.id] = canon
            else:
                missing.add(q.id)
        elif q.kind is QuestionKind.LIKERT:
            try:
                answers[q.id] = int(str(value).strip())
            except ValueError:
                missing.add(q.id)
        else:
            answers[q.id] = " ".join(str(value).split())
    return CleanResponse(raw.respondent_id, answers, frozenset(missing))


def impute_missing(clean: CleanResponse, schema: SurveySchema) -> CleanResponse:
    """Fill absent answers with the ``"unknown"`` / ``0`` sentinels; ``missing`` is kept as is."""
    answers = dict(clean.answers)
    for q in schema.non_pii:
        if q.id in answers:
            continue
        if q.kind is QuestionKind.LIKERT:
            answers[q.id] = 0
        elif q.kind is QuestionKind.MULTI_CHOICE:
            answers[q.id] = [UNKNOWN]
        else:
            answers[q.id] = UNKNOWN
    return CleanResponse(clean.respondent_id, answers, clean.missing)


def preprocess(raws: Sequence[RawResponse], schema: SurveySchema) -> list[CleanResponse]:
    """strip_pii -> normalize_response -> impute_missing, tokenizing ids by position."""
    return [
        impute_missing(normalize_response(strip_pii(raw, schema, i), schema), schema)
        for i, raw in enumerate(raws)
    ]


def text_answer(clean: CleanResponse, qid: str) -> str:
    """Free-text answer with blanks (and their imputed sentinel) mapped back to ``""``."""
    if qid in clean.missing:
        return ""
    value = clean.answers.get(qid, "")
    return value if isinstance(value, str) else ""


@dataclass(frozen=True)
class EncodingMap:
    """Per choice question, the sorted vocabulary; value ``vocab[i]`` has code ``i + 1``.

    Code 0 is reserved for missing or never-seen values.
    """

    vocab: dict[str, tuple[str, ...]]

    def code(self, qid: str, value: str) -> int:
        values = self.vocab[qid]
        i = _bisect(values, value)
        return i + 1 if i < len(values) and values[i] == value else 0

    def decode(self, qid: str, code: int) -> str:
        if code == 0:
            return UNKNOWN
        return self.vocab[qid][code - 1]

    def to_dict(self) -> dict:
        return {qid: list(values) for qid, values in self.vocab.items()}

    @classmethod
    def from_dict(cls, doc: dict) -> "EncodingMap":
        return cls({qid: tuple(values) for qid, values in doc.items()})


def _bisect(values: tuple[str, ...], x: str) -> int:
    lo, hi = 0, len(values)
    while lo < hi:
        mid = (lo + hi) // 2
        if values[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def fit_encoding(schema: SurveySchema, training: Iterable[CleanResponse]) -> EncodingMap:
    choice_qs = [q for q in schema.non_pii if q.kind.is_choice]
    seen: dict[str, set[str]] = {q.id: set(q.canonical_values()) for q in choice_qs}
    for resp in training:
        for q in choice_qs:
            if q.id in resp.missing:
                continue
            value = resp.answers.get(q.id)
            if isinstance(value, list):
                seen[q.id].update(value)
            elif isinstance(value, str):
                seen[q.id].add(value)
    return EncodingMap({qid: tuple(sorted(vals - {UNKNOWN, ""})) for qid, vals in seen.items()})


@dataclass
class Dataset:
    feature_names: list[str]
    rows: np.ndarray
    labels: np.ndarray | None = None
    row_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2:
            self.rows = self.rows.reshape(-1, len(self.feature_names))
        if self.rows.shape[1] != len(self.feature_names):
            raise DimensionMismatch(f"{len(self.feature_names)} feature names for {self.rows.shape[1]} columns")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if len(self.labels) != len(self.rows):
                raise DimensionMismatch(f"{len(self.labels)} labels for {len(self.rows)} rows")
        if not self.row_ids:
            self.row_ids = [str(i) for i in range(len(self.rows))]
        elif len(self.row_ids) != len(self.rows):
            raise DimensionMismatch(f"{len(self.row_ids)} row ids for {len(self.rows)} rows")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def subset(self, idx: Sequence[int]) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        return Dataset(
            list(self.feature_names),
            self.rows[idx],
            None if self.labels is None else self.labels[idx],
            [self.row_ids[i] for i in idx],
        )


def encoded_feature_names(schema: SurveySchema, encoding: EncodingMap) -> list[str]:
    names = []
    for q in schema.non_pii:
        if q.kind is QuestionKind.MULTI_CHOICE:
            names.extend(f"{q.id}={v}" for v in encoding.vocab[q.id])
        elif q.kind is not QuestionKind.FREE_TEXT:
            names.append(q.id)
    return names


def encode_dataset(
    schema: SurveySchema,
    encoding: EncodingMap,
    responses: Sequence[CleanResponse],
    labels: Sequence[int] | None = None,
) -> Dataset:
    """Numeric matrix for ``responses``.

    Single-choice answers become their code, Likert answers stay raw
    integers and each multi-choice vocabulary entry becomes a 0/1 column.
    Free text is left to the text scorer.
    """
    if labels is not None and len(labels) != len(responses):
        raise DimensionMismatch(f"{len(labels)} labels for {len(responses)} responses")
    names = encoded_feature_names(schema, encoding)
    rows = np.zeros((len(responses), len(names)))
    for r, resp in enumerate(responses):
        col = 0
        for q in schema.non_pii:
            value = resp.answers.get(q.id)
            if q.kind is QuestionKind.SINGLE_CHOICE:
                rows[r, col] = encoding.code(q.id, value) if isinstance(value, str) else 0
                col += 1
            elif q.kind is QuestionKind.LIKERT:
                rows[r, col] = value if isinstance(value, int) else 0
                col += 1
            elif q.kind is QuestionKind.MULTI_CHOICE:
                picked = set(value) if isinstance(value, list) else set()
                for v in encoding.vocab[q.id]:
                    rows[r, col] = 1.0 if v in picked else 0.0
                    col += 1
    return Dataset(names, rows, None if labels is None else np.asarray(labels), [r.respondent_id for r in responses])


def parse_responses_csv(data: bytes | str, schema: SurveySchema, *, multi_sep: str = ";") -> list[RawResponse]:
    responses, _ = read_labeled_csv(data, schema, multi_sep=multi_sep)
    return responses


def read_labeled_csv(
    data: bytes | str, schema: SurveySchema, *, multi_sep: str = ";"
) -> tuple[list[RawResponse], list[int] | None]:
    """Parse a response CSV and its optional ``Is_Fake`` column.

    Columns that are neither schema questions, ``respondent_id`` nor the
    label are dropped with a logged warning.  Raises :class:`DataError`
    (with the line number) on malformed CSV or bad label values.
    """
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    try:
        header = next(reader, None)
        if header is None:
            return [], None
        header = [h.strip() for h in header]
        kinds = {q.id: q.kind for q in schema.questions}
        dropped = [h for h in header if h not in kinds and h not in (ID_COLUMN, LABEL_COLUMN)]
        if dropped:
            log.warning("dropping columns not in schema: %s", ", ".join(dropped))
        has_labels = LABEL_COLUMN in header

        responses: list[RawResponse] = []
        labels: list[int] = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"line {reader.line_num}: expected {len(header)} fields, got {len(row)}")
            answers: dict[str, AnswerValue] = {}
            rid = str(len(responses))
            for col, cell in zip(header, row):
                if col == ID_COLUMN:
                    rid = cell.strip() or rid
                elif col == LABEL_COLUMN:
                    try:
                        label = int(cell.strip())
                    except ValueError:
                        label = -1
                    if label not in (0, 1):
                        raise DataError(f"line {reader.line_num}: {LABEL_COLUMN} must be 0 or 1, got {cell!r}")
                    labels.append(label)
                elif col in kinds and cell.strip():
                    answers[col] = _parse_cell(cell, kinds[col], multi_sep)
            responses.append(RawResponse(rid, answers))
    except csv.Error as exc:
        raise DataError(f"line {reader.line_num}: malformed CSV ({exc})") from exc
    return responses, labels if has_labels else None


def _parse_cell(cell: str, kind: QuestionKind, multi_sep: str) -> AnswerValue:
    if kind is QuestionKind.MULTI_CHOICE:
        return [part.strip() for part in cell.split(multi_sep) if part.strip()]
    if kind is QuestionKind.LIKERT:
        try:
            return int(cell.strip())
        except ValueError:
            return cell
    return cell


def format_cell(value: AnswerValue, multi_sep: str = ";") -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return multi_sep.join(str(v) for v in value)
    return str(value)


def responses_to_csv(
    schema: SurveySchema,
    responses: Sequence[RawResponse],
    labels: Sequence[int] | None = None,
    *,
    extra: Sequence[dict[str, str]] | None = None,
    extra_columns: Sequence[str] | None = None,
    multi_sep: str = ";",
) -> bytes:
    """Serialize responses in the layout :func:`read_labeled_csv` reads back.

    ``extra`` adds per-row columns after the answers (used for filter verdicts).
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if extra_columns is not None:
        extra_cols = list(extra_columns)
    else:
        extra_cols = list(extra[0]) if extra else []
    header = [ID_COLUMN, *schema.ids]
    if labels is not None:
        header.append(LABEL_COLUMN)
    writer.writerow(header + extra_cols)
    for i, raw in enumerate(responses):
        row = [raw.respondent_id] + [format_cell(raw.answers.get(qid), multi_sep) for qid in schema.ids]
        if labels is not None:
            row.append(str(int(labels[i])))
        if extra:
            row.extend(extra[i][c] for c in extra_cols)
        writer.writerow(row)
    return out.getvalue().encode("utf-8")
