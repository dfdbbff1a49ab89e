"""Effort and coherence scores for open-ended answers.

Texts are embedded with hashed character trigrams: each trigram of the
space-padded canonical text is hashed with 64-bit FNV-1a into one of
``dim`` buckets, and the bucket counts are L2-normalized.  This is a cheap,
deterministic stand-in for a sentence encoder that works well for the one-
or two-word answers typical of survey free-text boxes.  Any callable
``str -> np.ndarray`` of unit (or zero) vectors can be passed as ``embed``
to swap in a learned encoder.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from ._canon import normalize_label
from .ingest import CleanResponse, text_answer
from .rng import fnv1a64
from .rules import DEFAULT_STOPLIST
from .schema import QuestionKind, SurveySchema

EMBED_DIM = 256
LENGTH_SATURATION = 20
DISTINCT_SATURATION = 10

Embedder = Callable[[str], np.ndarray]


def embed_text(text: str, dim: int = EMBED_DIM) -> np.ndarray:
    canon = normalize_label(text)
    vec = np.zeros(dim)
    if not canon:
        return vec
    padded = f" {canon} "
    for i in range(len(padded) - 2):
        vec[fnv1a64(padded[i : i + 3]) % dim] += 1.0
    return vec / np.linalg.norm(vec)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two embeddings; 0.0 if either is the zero vector."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def coherence_score(free_texts: Sequence[str], embed: Embedder = embed_text) -> float:
    """(mean pairwise cosine + 1) / 2 over non-empty texts; 1.0 with fewer than two."""
    vecs = [embed(t) for t in free_texts if normalize_label(t)]
    if len(vecs) < 2:
        return 1.0
    sims = [cosine(a, b) for a, b in combinations(vecs, 2)]
    return (float(np.mean(sims)) + 1.0) / 2.0


def length_vocab_score(
    text: str,
    stoplist=DEFAULT_STOPLIST,
    length_saturation: int = LENGTH_SATURATION,
    distinct_saturation: int = DISTINCT_SATURATION,
) -> tuple[float, float]:
    canon = normalize_label(text)
    words = canon.split()
    length = min(len(words) / length_saturation, 1.0)
    if not canon or canon in stoplist:
        return length, 0.0
    return length, min(len(set(words)) / distinct_saturation, 1.0)


@dataclass(frozen=True)
class TextScoreReport:
    respondent_id: str
    coherence: float
    length_score: float
    vocab_score: float

    @property
    def combined(self) -> float:
        return 0.5 * self.coherence + 0.25 * self.length_score + 0.25 * self.vocab_score


@dataclass(frozen=True)
class TextScoreConfig:
    dim: int = EMBED_DIM
    length_saturation: int = LENGTH_SATURATION
    distinct_saturation: int = DISTINCT_SATURATION


def score_texts(
    clean: CleanResponse,
    schema: SurveySchema,
    stoplist=DEFAULT_STOPLIST,
    config: TextScoreConfig = TextScoreConfig(),
    embed: Embedder | None = None,
) -> TextScoreReport:
    """Text scores for one response, averaging length/vocab over every free-text question.

    A schema without free-text questions gets neutral scores of 1.0.
    """
    texts = [text_answer(clean, q.id) for q in schema.of_kind(QuestionKind.FREE_TEXT)]
    if embed is None:
        embed = lambda t: embed_text(t, config.dim)  # noqa: E731
    coherence = coherence_score(texts, embed)
    if not texts:
        return TextScoreReport(clean.respondent_id, coherence, 1.0, 1.0)
    pairs = [length_vocab_score(t, stoplist, config.length_saturation, config.distinct_saturation) for t in texts]
    return TextScoreReport(
        clean.respondent_id,
        coherence,
        sum(p[0] for p in pairs) / len(pairs),
        sum(p[1] for p in pairs) / len(pairs),
    )
