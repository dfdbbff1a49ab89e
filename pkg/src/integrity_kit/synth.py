"""Seeded synthetic respondents, genuine and fake.

Genuine respondents are sampled from persona tables (see
``data/personas.json``): each persona fixes or weights some answers, sets
Likert means and lists questions it leaves blank.  The bundled personas are
built so that no genuine response can fire a canonical contradiction rule.

Fake respondents follow one of four behaviours:

* ``CONTRADICTOR`` -- a genuine response with one contradiction rule forced true
* ``BLANK_HEAVY`` -- a genuine response with each field blanked with probability >= 0.6
* ``GIBBERISH`` -- random character strings for text, uniform random choices
* ``STRAIGHTLINER`` -- one Likert value everywhere, first option everywhere, throwaway text
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from . import data
from .evaluation import round_half_up
from .rng import Rng
from .rules import Condition, RuleSet
from .schema import AnswerValue, QuestionKind, QuestionSpec, RawResponse, SurveySchema

THROWAWAY_TEXT = ("ok", "yes", "n/a", "nothing", "no", "idk")


class FakeBehavior(str, Enum):
    CONTRADICTOR = "contradictor"
    BLANK_HEAVY = "blank_heavy"
    GIBBERISH = "gibberish"
    STRAIGHTLINER = "straightliner"


DEFAULT_MIX = {b: 1.0 for b in FakeBehavior}


@dataclass(frozen=True)
class SynthConfig:
    n: int = 99
    fake_fraction: float = 14 / 99
    behavior_mix: Mapping[FakeBehavior, float] = field(default_factory=lambda: dict(DEFAULT_MIX))
    seed: int = 0
    blank_probability: float = 0.6
    # chance that a genuine choice answer is written in a non-canonical variant ("sap", "SAP.")
    variant_probability: float = 0.1
    text_blank_probability: float = 0.1

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0.0 <= self.fake_fraction <= 1.0:
            raise ValueError("fake_fraction must lie in [0, 1]")
        if sum(self.behavior_mix.values()) <= 0:
            raise ValueError("behavior_mix weights must sum to a positive value")


def _weighted(rng: Rng, table: Mapping[str, float]) -> str:
    keys = list(table)
    return keys[rng.weighted_index([table[k] for k in keys])]


def _likert_near(rng: Rng, q: QuestionSpec, mean: float | None) -> int:
    lo, hi = q.likert
    if mean is None:
        return lo + rng.integers(hi - lo + 1)
    offset = (-1, 0, 0, 1)[rng.integers(4)]
    return min(hi, max(lo, int(round(mean)) + offset))


def _variant(rng: Rng, value: str) -> str:
    k = rng.integers(4)
    if k == 0:
        return value.lower()
    if k == 1:
        return value.upper()
    if k == 2:
        return value + "."
    return f"  {value} "


def _sentence(rng: Rng, bank: Sequence[str]) -> str:
    first = rng.integers(len(bank))
    text = bank[first]
    if rng.bernoulli(0.5):
        second = (first + 1 + rng.integers(len(bank) - 1)) % len(bank)
        text += " and " + bank[second]
    return text[0].upper() + text[1:] + "."


def _pii(rng: Rng, q: QuestionSpec, names: Mapping[str, Sequence[str]]) -> str:
    first, last = rng.choice(names["first"]), rng.choice(names["last"])
    if "mail" in q.id:
        return f"{first}.{last}@example.com".lower()
    return f"{first} {last}"


def _random_subset(rng: Rng, values: Sequence[str]) -> list[str]:
    k = 1 + rng.integers(min(3, len(values)))
    return [values[i] for i in rng.sample(len(values), k)]


def generate_genuine(schema: SurveySchema, rng: Rng, personas: dict | None = None,
                     config: SynthConfig = SynthConfig()) -> RawResponse:
    """One internally consistent respondent drawn from a persona."""
    personas = personas or data.personas_doc()
    table = personas["personas"]
    persona = table[rng.weighted_index([p["weight"] for p in table])]
    bank = personas.get("text_bank", {})
    answers: dict[str, AnswerValue] = {}
    for q in schema.questions:
        if q.pii:
            answers[q.id] = _pii(rng, q, personas["names"])
        elif q.id in persona.get("blank", ()):
            continue
        elif q.kind is QuestionKind.LIKERT:
            answers[q.id] = _likert_near(rng, q, persona.get("likert", {}).get(q.id))
        elif q.kind is QuestionKind.SINGLE_CHOICE:
            weights = persona.get("choices", {}).get(q.id)
            value = _weighted(rng, weights) if weights else rng.choice(q.values)
            answers[q.id] = _variant(rng, value) if rng.bernoulli(config.variant_probability) else value
        elif q.kind is QuestionKind.MULTI_CHOICE:
            answers[q.id] = _random_subset(rng, q.values)
        elif not rng.bernoulli(config.text_blank_probability):
            answers[q.id] = _sentence(rng, bank.get(q.id) or sum(bank.values(), []))
    return RawResponse("", answers)


def _satisfy(answers: dict, cond: Condition, schema: SurveySchema, rng: Rng, bank) -> None:
    """Edit ``answers`` so that ``cond`` holds."""
    q = schema.question(cond.question_id)
    if cond.op == "is_blank":
        answers.pop(q.id, None)
        return
    if cond.op == "not_blank":
        if answers.get(q.id) not in (None, "", []):
            return
        choices = None
    else:
        choices = list(cond.values)
    if q.kind is QuestionKind.LIKERT:
        options = [int(v) for v in choices] if choices else list(range(q.likert[0], q.likert[1] + 1))
        answers[q.id] = rng.choice(options)
    elif q.kind.is_choice:
        canon = dict(zip(q.canonical_values(), q.values))
        options = [canon.get(v, v) for v in choices] if choices else list(q.values)
        pick = rng.choice(options)
        answers[q.id] = [pick] if q.kind is QuestionKind.MULTI_CHOICE else pick
    else:
        answers[q.id] = rng.choice(choices) if choices else _sentence(rng, bank.get(q.id) or sum(bank.values(), []))


def _gibberish(rng: Rng) -> str:
    words = []
    for _ in range(1 + rng.integers(3)):
        words.append("".join(rng.choice(string.ascii_lowercase) for _ in range(3 + rng.integers(7))))
    return " ".join(words)


def generate_fake(schema: SurveySchema, behavior: FakeBehavior, rng: Rng, *, rules: RuleSet | None = None,
                  personas: dict | None = None, config: SynthConfig = SynthConfig()) -> RawResponse:
    personas = personas or data.personas_doc()
    behavior = FakeBehavior(behavior)

    if behavior is FakeBehavior.CONTRADICTOR:
        rules = rules if rules is not None else data.example_rules()
        if not rules.contradictions:
            raise ValueError("contradictor fakes need at least one contradiction rule")
        resp = generate_genuine(schema, rng, personas, config)
        rule = rng.choice(rules.contradictions)
        _satisfy(resp.answers, rule.antecedent, schema, rng, personas.get("text_bank", {}))
        _satisfy(resp.answers, rule.conflicting, schema, rng, personas.get("text_bank", {}))
        return resp

    if behavior is FakeBehavior.BLANK_HEAVY:
        resp = generate_genuine(schema, rng, personas, config)
        for q in schema.non_pii:
            if rng.bernoulli(config.blank_probability):
                resp.answers.pop(q.id, None)
        return resp

    answers: dict[str, AnswerValue] = {}
    likert_qs = schema.of_kind(QuestionKind.LIKERT)
    line_value = None
    if behavior is FakeBehavior.STRAIGHTLINER and likert_qs:
        lo, hi = likert_qs[0].likert
        line_value = lo + rng.integers(hi - lo + 1)
    for q in schema.questions:
        if q.pii:
            answers[q.id] = _pii(rng, q, personas["names"])
        elif behavior is FakeBehavior.GIBBERISH:
            if q.kind is QuestionKind.LIKERT:
                answers[q.id] = _likert_near(rng, q, None)
            elif q.kind is QuestionKind.SINGLE_CHOICE:
                answers[q.id] = rng.choice(q.values)
            elif q.kind is QuestionKind.MULTI_CHOICE:
                answers[q.id] = _random_subset(rng, q.values)
            else:
                answers[q.id] = _gibberish(rng)
        else:
            if q.kind is QuestionKind.LIKERT:
                answers[q.id] = min(q.likert[1], max(q.likert[0], line_value))
            elif q.kind is QuestionKind.SINGLE_CHOICE:
                answers[q.id] = q.values[0]
            elif q.kind is QuestionKind.MULTI_CHOICE:
                answers[q.id] = [q.values[0]]
            else:
                answers[q.id] = rng.choice(THROWAWAY_TEXT)
    return RawResponse("", answers)


def generate_dataset(schema: SurveySchema, config: SynthConfig = SynthConfig(), *,
                     rules: RuleSet | None = None, personas: dict | None = None) -> tuple[list[RawResponse], list[int]]:
    """``config.n`` respondents, exactly ``round(n * fake_fraction)`` of them fake, in shuffled order.

    Respondent ids are ``r0000``, ``r0001``, ... in output order.
    """
    rng = Rng(config.seed)
    personas = personas or data.personas_doc()
    n_fake = round_half_up(config.fake_fraction, config.n)
    labels = [1] * n_fake + [0] * (config.n - n_fake)
    rng.shuffle(labels)
    behaviors = list(config.behavior_mix)
    weights = [config.behavior_mix[b] for b in behaviors]
    raws = []
    for i, label in enumerate(labels):
        if label:
            behavior = behaviors[rng.weighted_index(weights)]
            resp = generate_fake(schema, behavior, rng, rules=rules, personas=personas, config=config)
        else:
            resp = generate_genuine(schema, rng, personas, config)
        resp.respondent_id = f"r{i:04d}"
        raws.append(resp)
    return raws, labels

