import pytest

from integrity_kit.ingest import preprocess, responses_to_csv
from integrity_kit.rng import Rng
from integrity_kit.rules import blank_fraction, check_contradictions
from integrity_kit.schema import QuestionKind, QuestionSpec, SurveySchema, validate_response
from integrity_kit.synth import FakeBehavior, SynthConfig, generate_dataset, generate_fake, generate_genuine


def cleaned(raws, schema):
    return preprocess(raws, schema)


@pytest.fixture(scope="module")
def genuine_1000(schema):
    return cleaned([generate_genuine(schema, Rng(seed)) for seed in range(1000)], schema)


def test_genuine_never_contradicts(genuine_1000, rules):
    assert all(check_contradictions(c, rules) == [] for c in genuine_1000)


def test_genuine_mostly_complete(genuine_1000, schema):
    assert max(blank_fraction(c, schema) for c in genuine_1000) < 0.5


def test_genuine_is_structurally_valid(schema):
    for seed in range(200):
        assert validate_response(schema, generate_genuine(schema, Rng(seed))) == []


def test_genuine_free_text_length(schema):
    for seed in range(200):
        raw = generate_genuine(schema, Rng(seed))
        for q in schema.of_kind(QuestionKind.FREE_TEXT):
            if q.id in raw.answers:
                assert 5 <= len(raw.answers[q.id].split()) <= 25


def test_same_rng_state_same_response(schema):
    assert generate_genuine(schema, Rng(9)) == generate_genuine(schema, Rng(9))


def test_contradictors_always_fire(schema, rules):
    raws = [generate_fake(schema, FakeBehavior.CONTRADICTOR, Rng(seed), rules=rules) for seed in range(1000)]
    assert all(check_contradictions(c, rules) for c in cleaned(raws, schema))


def test_blank_heavy_rate(schema):
    raws = [generate_fake(schema, FakeBehavior.BLANK_HEAVY, Rng(seed)) for seed in range(1000)]
    fracs = [blank_fraction(c, schema) for c in cleaned(raws, schema)]
    assert sum(fracs) / len(fracs) == pytest.approx(0.6, abs=0.1)


def test_straightliner_on_five_likerts():
    schema = SurveySchema(tuple(
        QuestionSpec(f"l{i}", "", QuestionKind.LIKERT, likert=(1, 5)) for i in range(5)
    ) + (QuestionSpec("c", "", QuestionKind.SINGLE_CHOICE, ("first", "second")),))
    for seed in range(50):
        raw = generate_fake(schema, FakeBehavior.STRAIGHTLINER, Rng(seed))
        assert len({raw.answers[f"l{i}"] for i in range(5)}) == 1
        assert raw.answers["c"] == "first"


def test_gibberish_text_is_not_from_the_phrase_bank(schema):
    raw = generate_fake(schema, FakeBehavior.GIBBERISH, Rng(1))
    text = raw.answers["current_challenges"]
    assert text.replace(" ", "").isalpha() and text == text.lower()


def test_fake_count_follows_rounding(schema, rules):
    _, labels = generate_dataset(schema, SynthConfig(n=99, fake_fraction=14 / 99, seed=0), rules=rules)
    assert sum(labels) == 14 and len(labels) == 99
    _, labels = generate_dataset(schema, SynthConfig(n=30, fake_fraction=0.0, seed=0), rules=rules)
    assert sum(labels) == 0


def test_dataset_csv_is_reproducible(schema, rules):
    cfg = SynthConfig(n=40, fake_fraction=0.2, seed=11)
    a = responses_to_csv(schema, *generate_dataset(schema, cfg, rules=rules))
    b = responses_to_csv(schema, *generate_dataset(schema, cfg, rules=rules))
    assert a == b
    other = responses_to_csv(schema, *generate_dataset(schema, SynthConfig(n=40, fake_fraction=0.2, seed=12), rules=rules))
    assert other != a


def test_behavior_mix_restricts_behaviors(schema, rules):
    cfg = SynthConfig(n=50, fake_fraction=1.0, seed=2, behavior_mix={FakeBehavior.CONTRADICTOR: 1.0})
    raws, labels = generate_dataset(schema, cfg, rules=rules)
    assert all(labels)
    assert all(check_contradictions(c, rules) for c in cleaned(raws, schema))


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(n=-1)
    with pytest.raises(ValueError):
        SynthConfig(fake_fraction=1.5)
    with pytest.raises(ValueError):
        SynthConfig(behavior_mix={FakeBehavior.GIBBERISH: 0.0})
