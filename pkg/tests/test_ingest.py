import numpy as np
import pytest
from hypothesis import given, strategies as st

from integrity_kit.errors import DataError, DimensionMismatch
from integrity_kit.ingest import (
    UNKNOWN,
    EncodingMap,
    encode_dataset,
    fit_encoding,
    impute_missing,
    normalize_label,
    normalize_response,
    parse_responses_csv,
    preprocess,
    read_labeled_csv,
    responses_to_csv,
    strip_pii,
)
from integrity_kit.schema import QuestionKind, QuestionSpec, RawResponse, SurveySchema

Q = QuestionSpec
K = QuestionKind

SCHEMA = SurveySchema((
    Q("erp_type", "ERP", K.SINGLE_CHOICE, ("SAP", "Oracle ERP")),
    Q("sat", "Satisfaction", K.LIKERT, likert=(1, 5)),
    Q("areas", "Areas", K.MULTI_CHOICE, ("cost", "security", "speed")),
    Q("notes", "Notes", K.FREE_TEXT),
    Q("email", "Email", K.FREE_TEXT, pii=True),
))


def clean(answers, rid="0"):
    return normalize_response(RawResponse(rid, answers), SCHEMA)


# normalize_label

def test_normalize_label_examples():
    assert normalize_label("Oracle ERP") == normalize_label("oracle erp") == "oracle erp"
    assert normalize_label("  SAP  ") == "sap"
    assert normalize_label("") == ""
    assert normalize_label("Don't know.") == "don't know"
    assert normalize_label("N/A") == "n/a"


@given(st.text())
def test_normalize_label_idempotent(text):
    once = normalize_label(text)
    assert normalize_label(once) == once


@given(st.text())
def test_normalize_label_has_no_edge_space(text):
    out = normalize_label(text)
    assert out == out.strip() and "  " not in out


# strip_pii

def test_strip_pii_drops_email_and_tokenizes():
    out = strip_pii(RawResponse("alice", {"email": "a@b.c", "erp_type": "SAP"}), SCHEMA, 4)
    assert "email" not in out.answers
    assert out.respondent_id == "4"


def test_strip_pii_without_pii_keeps_answers():
    raw = RawResponse("bob", {"erp_type": "SAP"})
    out = strip_pii(raw, SCHEMA, 0)
    assert out.answers == raw.answers and out.respondent_id == "0"


def test_distinct_respondents_get_distinct_tokens():
    ids = [c.respondent_id for c in preprocess([RawResponse("x"), RawResponse("x")], SCHEMA)]
    assert len(set(ids)) == 2


# normalization and imputation

def test_normalize_response_canonicalizes():
    c = clean({"erp_type": " ORACLE erp. ", "sat": "4", "areas": ["Speed", "cost", "COST"], "notes": "  a   b "})
    assert c.answers == {"erp_type": "oracle erp", "sat": 4, "areas": ["cost", "speed"], "notes": "a b"}
    assert c.missing == frozenset()


def test_blank_and_unparseable_values_are_missing():
    c = clean({"erp_type": "  ", "sat": "lots", "areas": []})
    assert c.missing == {"erp_type", "sat", "areas", "notes"}


def test_impute_missing_sentinels():
    imputed = impute_missing(clean({}), SCHEMA)
    assert imputed.answers == {"erp_type": UNKNOWN, "sat": 0, "areas": [UNKNOWN], "notes": UNKNOWN}
    assert imputed.missing == {"erp_type", "sat", "areas", "notes"}


def test_impute_keeps_missing_set_and_complete_answers():
    c = clean({"sat": 2, "areas": ["cost"], "notes": "x"})
    imputed = impute_missing(c, SCHEMA)
    assert imputed.answers["erp_type"] == UNKNOWN
    assert "erp_type" in imputed.missing
    full = clean({"erp_type": "sap", "sat": 2, "areas": ["cost"], "notes": "x"})
    assert impute_missing(full, SCHEMA) == full


def test_pii_never_reaches_clean_responses():
    [c] = preprocess([RawResponse("r", {"email": "a@b.c", "notes": "hi"})], SCHEMA)
    assert "email" not in c.answers and "email" not in c.missing


# encoding

def test_fit_encoding_sorted_and_unknown_excluded():
    training = preprocess([RawResponse("a", {"erp_type": "SAP"}), RawResponse("b", {"erp_type": "Workday"})], SCHEMA)
    enc = fit_encoding(SCHEMA, training)
    assert enc.vocab["erp_type"] == ("oracle erp", "sap", "workday")
    assert enc.code("erp_type", "oracle erp") == 1 and enc.code("erp_type", "sap") == 2
    assert enc.code("erp_type", UNKNOWN) == 0
    assert enc.code("erp_type", "never seen") == 0


def test_fit_encoding_on_empty_training_uses_declared_values():
    s = SurveySchema((Q("c", "c", K.SINGLE_CHOICE, ("b", "a")),))
    assert fit_encoding(s, []).vocab == {"c": ("a", "b")}


@given(st.lists(st.text(min_size=1, max_size=8), min_size=1, max_size=10, unique=True))
def test_encoding_round_trip(values):
    vocab = tuple(sorted(values))
    enc = EncodingMap({"q": vocab})
    for v in vocab:
        assert enc.decode("q", enc.code("q", v)) == v
    assert enc.decode("q", 0) == UNKNOWN
    assert EncodingMap.from_dict(enc.to_dict()) == enc


def test_encode_dataset_layout():
    cleans = preprocess([RawResponse("a", {"erp_type": "SAP", "sat": 3, "areas": ["cost", "security"]})], SCHEMA)
    enc = fit_encoding(SCHEMA, cleans)
    ds = encode_dataset(SCHEMA, enc, cleans, [1])
    assert ds.feature_names == ["erp_type", "sat", "areas=cost", "areas=security", "areas=speed"]
    assert ds.rows.tolist() == [[2.0, 3.0, 1.0, 1.0, 0.0]]
    assert ds.labels.tolist() == [1]


def test_encode_zero_responses_keeps_width():
    enc = fit_encoding(SCHEMA, [])
    ds = encode_dataset(SCHEMA, enc, [])
    assert (ds.n, ds.d) == (0, 5)


def test_encode_label_length_mismatch():
    enc = fit_encoding(SCHEMA, [])
    with pytest.raises(DimensionMismatch):
        encode_dataset(SCHEMA, enc, preprocess([RawResponse("a")], SCHEMA), [0, 1])


def test_encoded_codes_bounded(corpus, schema):
    raws, labels = corpus
    cleans = preprocess(raws, schema)
    enc = fit_encoding(schema, cleans)
    ds = encode_dataset(schema, enc, cleans, labels)
    assert np.isfinite(ds.rows).all()
    for j, name in enumerate(ds.feature_names):
        if name in enc.vocab:
            assert 0 <= ds.rows[:, j].min() and ds.rows[:, j].max() <= len(enc.vocab[name])
    assert ds.feature_names == encode_dataset(schema, enc, cleans).feature_names


# CSV

def test_parse_csv_basic():
    [r] = parse_responses_csv(b"respondent_id,erp_type\nr1,SAP\n", SCHEMA)
    assert (r.respondent_id, r.answers) == ("r1", {"erp_type": "SAP"})


def test_parse_csv_empty_cell_is_absent_and_multi_split():
    [r] = parse_responses_csv("respondent_id,erp_type,areas\nr1,,a;b\n", SCHEMA)
    assert r.answers == {"areas": ["a", "b"]}


def test_parse_csv_drops_unknown_columns(caplog):
    [r] = parse_responses_csv("respondent_id,mystery\nr1,x\n", SCHEMA)
    assert r.answers == {}
    assert "mystery" in caplog.text


def test_parse_csv_unbalanced_quote_reports_line():
    with pytest.raises(DataError, match="line"):
        parse_responses_csv('respondent_id,notes\nr1,fine\nr2,"broken\n', SCHEMA)


def test_parse_csv_bad_label():
    with pytest.raises(DataError, match="Is_Fake"):
        read_labeled_csv("respondent_id,Is_Fake\nr1,maybe\n", SCHEMA)


def test_csv_round_trip(corpus, schema):
    raws, labels = corpus
    back, back_labels = read_labeled_csv(responses_to_csv(schema, raws, labels), schema)
    assert back_labels == labels
    assert preprocess(back, schema) == preprocess(raws, schema)
