import json
import xml.etree.ElementTree as ET

import pytest

from integrity_kit.errors import DataError, DimensionMismatch
from integrity_kit.evaluation import ConfusionMatrix, ImportanceRanking, evaluate
from integrity_kit.ingest import preprocess
from integrity_kit.pipeline import analyze, judge
from integrity_kit.report import (
    JITTER,
    emit_eval_json,
    metrics_table,
    read_scatter_inputs,
    render_confusion_svg,
    render_importance_svg,
    scatter_csv,
    scatter_inputs_csv,
    scatter_rows,
    write_report,
)
from integrity_kit.rules import RuleSet
from integrity_kit.schema import QuestionKind, QuestionSpec, RawResponse, SurveySchema

SVG = "{http://www.w3.org/2000/svg}"


def texts_of(svg: bytes) -> list[str]:
    return [t.text for t in ET.fromstring(svg).iter(SVG + "text")]


def bars_of(svg: bytes):
    return [r for r in ET.fromstring(svg).iter(SVG + "rect")]


def test_eval_json_stable_and_parseable():
    rep = evaluate("forest", [0, 1], [0, 1])
    a, b = emit_eval_json(rep), emit_eval_json(rep)
    assert a == b
    doc = json.loads(a)
    assert doc["importances"] == [] and doc["confusion"] == {"tn": 1, "fp": 0, "fn": 0, "tp": 1}
    assert list(doc) == sorted(doc)


def test_confusion_svg_counts_and_labels():
    svg = render_confusion_svg(ConfusionMatrix(21, 0, 2, 2))
    texts = texts_of(svg)
    assert {"21", "0", "2", "Genuine", "Fake"} <= set(texts)
    assert render_confusion_svg(ConfusionMatrix(21, 0, 2, 2)) == svg


def test_confusion_svg_rejects_empty():
    with pytest.raises(DataError):
        render_confusion_svg(ConfusionMatrix())


def test_importance_single_full_width_bar():
    [bar] = bars_of(render_importance_svg(ImportanceRanking.from_values(["x"], [1.0])))
    assert float(bar.get("width")) == 360.0


def test_importance_top_k():
    ranking = ImportanceRanking.from_values([f"f{i}" for i in range(10)], [i / 45 for i in range(10)])
    svg = render_importance_svg(ranking, top_k=3)
    assert len(bars_of(svg)) == 3
    labels = [t for t in texts_of(svg) if t and t.startswith("f")]
    assert labels == ["f9", "f8", "f7"]


def test_importance_equal_values():
    svg = render_importance_svg(ImportanceRanking.from_values(["b", "a"], [0.5, 0.5]))
    assert len({b.get("width") for b in bars_of(svg)}) == 1
    assert [t for t in texts_of(svg) if t in ("a", "b")] == ["a", "b"]


def test_importance_rejects_empty():
    with pytest.raises(DataError):
        render_importance_svg(ImportanceRanking(()))


def test_escaping_keeps_xml_well_formed():
    svg = render_importance_svg(ImportanceRanking.from_values(["a<b & c"], [1.0]), title="<T>")
    assert "a<b & c" in texts_of(svg)


def one_word_reports():
    schema = SurveySchema((QuestionSpec("a", "", QuestionKind.FREE_TEXT), QuestionSpec("b", "", QuestionKind.FREE_TEXT)))
    cleans = preprocess([RawResponse(str(i), {"a": "ok", "b": "fine"}) for i in range(20)], schema)
    return analyze(cleans, schema, RuleSet())


def test_one_word_answers_cluster_low():
    logic, texts = one_word_reports()
    rows = scatter_rows(logic, texts, ["genuine"] * 20, seed=1)
    assert all(r.text_length_norm <= 0.1 for r in rows)


def test_scatter_jitter_seeded_and_bounded():
    logic, texts = one_word_reports()
    a = scatter_rows(logic, texts, ["genuine"] * 20, seed=1)
    assert a == scatter_rows(logic, texts, ["genuine"] * 20, seed=1)
    assert a != scatter_rows(logic, texts, ["genuine"] * 20, seed=2)
    assert all(abs(r.jitter_x) <= JITTER and abs(r.jitter_y) <= JITTER for r in a)
    assert scatter_rows([], [], []) == []
    with pytest.raises(DimensionMismatch):
        scatter_rows(logic, texts, ["genuine"])


def test_scatter_inputs_round_trip(trained_forest, schema, rules, corpus):
    verdicts = judge(trained_forest[0], schema, rules, corpus[0][:15])
    logic, texts, preds = read_scatter_inputs(scatter_inputs_csv(verdicts))
    rows = scatter_rows(logic, texts, preds, seed=0)
    assert [r.logic_score for r in rows] == [v.logic_score for v in verdicts]
    assert [r.text_length_norm for r in rows] == [v.text.length_score for v in verdicts]
    assert scatter_csv(rows).decode().splitlines()[0] == \
        "respondent_id,text_length_norm,logic_score,predicted_label,jitter_x,jitter_y"


def test_write_report_layout(tmp_path, trained_forest):
    _, report = trained_forest
    paths = write_report(tmp_path / "report", report, scatter=[])
    assert sorted(p.name for p in paths) == ["confusion_forest.svg", "eval.json", "importance.svg", "scatter.csv"]
    for p in paths:
        if p.suffix == ".svg":
            ET.parse(p)


def test_metrics_table_two_decimals(trained_forest):
    line = metrics_table([trained_forest[1]]).splitlines()[1]
    assert line.split()[0] == "forest" and all(len(x.split(".")[1]) == 2 for x in line.split()[1:])
