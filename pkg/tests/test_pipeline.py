import json

import pytest

from integrity_kit.errors import ConfigError, DimensionMismatch
from integrity_kit.evaluation import stratified_indices
from integrity_kit.ingest import fit_encoding, preprocess, read_labeled_csv
from integrity_kit.models import GbtConfig, LogRegConfig
from integrity_kit.pipeline import (
    SCORE_FEATURES,
    PipelineConfig,
    TrainedModel,
    analyze,
    assemble_features,
    filter_csvs,
    judge,
    load_pipeline_config,
    run_filter,
    run_training,
    segment,
)
from integrity_kit.rules import logic_score
from integrity_kit.schema import RawResponse


def test_assemble_appends_score_columns(schema, rules, corpus):
    raws, labels = corpus
    cleans = preprocess(raws[:10], schema)
    enc = fit_encoding(schema, cleans)
    logic, texts = analyze(cleans, schema, rules)
    base = assemble_features(schema, enc, cleans, logic, texts, include_scores=False)
    full = assemble_features(schema, enc, cleans, logic, texts)
    assert full.d == base.d + 5
    assert full.feature_names[-5:] == list(SCORE_FEATURES)
    with pytest.raises(DimensionMismatch):
        assemble_features(schema, enc, cleans, logic[::-1], texts)


def test_perfect_response_score_columns(schema, rules, corpus):
    raws, labels = corpus
    i = next(i for i, (r, y) in enumerate(zip(raws, labels)) if y == 0 and len(r.answers) == len(schema.questions))
    [c] = preprocess([raws[i]], schema)
    logic, texts = analyze([c], schema, rules)
    row = assemble_features(schema, fit_encoding(schema, [c]), [c], logic, texts).rows[0]
    assert row[-5] == 0.0 and row[-4] == 1.0
    assert 0.0 < row[-2] <= 1.0 and 0.0 < row[-1] <= 1.0


def test_training_is_deterministic(schema, rules, corpus):
    raws, labels = corpus
    cfg = PipelineConfig(model_kind="gbt", model_config=GbtConfig(rounds=10), seed=5)
    a, ra = run_training(schema, raws, labels, rules, cfg)
    b, rb = run_training(schema, raws, labels, rules, cfg)
    assert a.dumps() == b.dumps()
    assert ra.to_dict() == rb.to_dict()


def test_training_report_shape(trained_forest):
    trained, report = trained_forest
    assert report.confusion.total == 40  # 20% of 200, stratified
    assert report.metrics.accuracy > 0.8
    assert {name for name, _ in report.importances.items} == set(trained.feature_names)


def test_encoding_sees_only_training_rows(schema, rules, corpus):
    raws, labels = list(corpus[0]), list(corpus[1])
    _, test_idx = stratified_indices(labels, 0.2, 1)
    i = int(test_idx[0])
    raws[i] = RawResponse(raws[i].respondent_id, dict(raws[i].answers, primary_erp="Homegrown ERP"))
    trained, _ = run_training(schema, raws, labels, rules, PipelineConfig(
        model_kind="logreg", model_config=LogRegConfig(epochs=20), seed=1, test_fraction=0.2))
    assert "homegrown erp" not in trained.encoding.vocab["primary_erp"]
    assert trained.encoding.code("primary_erp", "homegrown erp") == 0


def test_single_class_training_warns(schema, rules, corpus):
    raws, labels = corpus
    genuine = [r for r, y in zip(raws, labels) if y == 0][:40]
    _, report = run_training(schema, genuine, [0] * 40, rules, PipelineConfig(seed=1))
    assert report.warnings
    assert report.metrics.fake.recall == 0.0 and report.metrics.fake.precision == 0.0


def test_model_json_round_trip(trained_forest, schema, rules, corpus):
    trained, _ = trained_forest
    back = TrainedModel.loads(trained.dumps())
    assert back.dumps() == trained.dumps()
    raws = corpus[0][:20]
    assert [v.payload() for v in judge(back, schema, rules, raws)] == [v.payload() for v in judge(trained, schema, rules, raws)]


def test_filter_partition_and_reasons(trained_forest, schema, rules, corpus):
    trained, _ = trained_forest
    raws, labels = corpus
    out = run_filter(schema, raws, trained, rules)
    ids = [r.respondent_id for r in raws]
    assert sorted(out.retained + [f[0] for f in out.flagged]) == sorted(ids)
    assert not set(out.retained) & {f[0] for f in out.flagged}
    for rid, reasons, prob, _ in out.flagged:
        assert "model" in reasons and prob >= trained.decision_threshold


def test_filter_on_clean_corpus_flags_little(trained_forest, schema, rules, corpus):
    trained, _ = trained_forest
    raws, labels = corpus
    genuine = [r for r, y in zip(raws, labels) if y == 0]
    assert len(run_filter(schema, genuine, trained, rules).flagged) <= 0.05 * len(genuine)


def test_drop_suspicious_flags_erp_contradiction(trained_forest, schema, rules, corpus):
    trained, _ = trained_forest
    raws, labels = corpus
    base = next(r for r, y in zip(raws, labels) if y == 0)
    answers = {k: v for k, v in base.answers.items() if k in ("full_name", "email", "industry")}
    answers.update(erp_usage="No ERP system used", primary_erp="Oracle ERP")
    raw = RawResponse("x", answers)
    [c] = preprocess([raw], schema)
    assert logic_score(c, schema, rules).suspicious
    out = run_filter(schema, [raw], trained, rules, PipelineConfig(drop_suspicious_pre_model=True))
    assert out.retained == [] and "no_erp_but_vendor" in out.flagged[0][1]


def test_filter_empty_input(trained_forest, schema, rules):
    out = run_filter(schema, [], trained_forest[0], rules)
    assert out.retained == [] and out.flagged == []


def test_filter_csvs_layout(trained_forest, schema, rules, corpus):
    trained, _ = trained_forest
    raws, labels = corpus
    out = run_filter(schema, raws, trained, rules)
    kept, flagged = filter_csvs(schema, raws, out, labels)
    header = kept.decode().splitlines()[0].split(",")
    assert header[-4:] == ["verdict", "prob_fake", "logic_score", "reasons"]
    back, back_labels = read_labeled_csv(kept, schema)
    assert [r.respondent_id for r in back] == out.retained
    assert len(flagged.decode().splitlines()) == len(out.flagged) + 1


def test_segment_counts(schema):
    raws = [RawResponse(str(i), {"primary_erp": "SAP"}) for i in range(10)]
    cleans = preprocess(raws, schema)
    assert segment(cleans, [], schema) == {}
    assert segment(cleans, ["primary_erp"], schema) == {"primary_erp": {"sap": 10}}
    mixed = preprocess(raws[:3] + [RawResponse("x", {})], schema)
    report = segment(mixed, ["primary_erp", "company_size"], schema)
    assert all(sum(v.values()) == 4 for v in report.values())
    with pytest.raises(ConfigError):
        segment(cleans, ["nope"], schema)


def test_pipeline_config_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"schema": "s.json", "model_kind": "rf", "model_config": {"n_trees": 7},
                                "segment_by": ["industry"], "seed": 3}))
    cfg, paths = load_pipeline_config(path)
    assert cfg.model_kind == "forest" and cfg.model_config.n_trees == 7 and cfg.segment_by == ("industry",)
    assert paths == {"schema": "s.json"}
    with pytest.raises(ConfigError):
        PipelineConfig(model_kind="svm")
