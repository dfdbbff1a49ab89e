"""Static report artifacts: eval JSON, confusion-matrix and importance SVGs, score scatter data.

Everything here is byte-deterministic for a given input and seed.  A report
directory looks like::

    eval.json  confusion_<model>.svg  importance.svg  scatter.csv
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from . import jsonfmt
from .errors import DataError, DimensionMismatch
from .evaluation import ConfusionMatrix, EvalReport, ImportanceRanking
from .rng import Rng, derive_seed
from .rules import LogicReport
from .textscore import TextScoreReport

JITTER = 0.02
SCATTER_COLUMNS = ("respondent_id", "text_length_norm", "logic_score", "predicted_label", "jitter_x", "jitter_y")
SCATTER_INPUT_COLUMNS = ("respondent_id", "logic_score", "length_score", "predicted_label")


def emit_eval_json(report: EvalReport) -> bytes:
    return (jsonfmt.dumps(report.to_dict(), digits=None, indent=2) + "\n").encode("utf-8")


def _svg(width: int, height: int, body: list[str]) -> bytes:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="Helvetica, Arial, sans-serif">')
    return ("\n".join([head, *body, "</svg>"]) + "\n").encode("utf-8")


def _shade(frac: float) -> str:
    # white -> steel blue
    r = round(255 - frac * (255 - 70))
    g = round(255 - frac * (255 - 110))
    b = round(255 - frac * (255 - 180))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_confusion_svg(cm: ConfusionMatrix, title: str = "Confusion Matrix") -> bytes:
    """2x2 annotated grid: rows are the true class, columns the predicted class.

    Each row is captioned with its correctly classified share, e.g. "2 out of 4".
    """
    if cm.total <= 0:
        raise DataError("cannot render an empty confusion matrix")
    cell, left, top = 120, 130, 70
    cells = ((cm.tn, cm.fp), (cm.fn, cm.tp))
    peak = max(max(row) for row in cells)
    body = [f'<text x="{left + cell}" y="28" text-anchor="middle" font-size="18">{escape(title)}</text>',
            f'<text x="{left + cell}" y="54" text-anchor="middle" font-size="13">Predicted</text>']
    for j, name in enumerate(("Genuine", "Fake")):
        body.append(f'<text x="{left + j * cell + cell // 2}" y="{top + 2 * cell + 22}" '
                    f'text-anchor="middle" font-size="13">{name}</text>')
        body.append(f'<text x="{left - 12}" y="{top + j * cell + cell // 2 + 5}" '
                    f'text-anchor="end" font-size="13">{name}</text>')
    body.append(f'<text x="24" y="{top + cell}" text-anchor="middle" font-size="13" '
                f'transform="rotate(-90 24 {top + cell})">Actual</text>')
    for i, row in enumerate(cells):
        for j, count in enumerate(row):
            frac = count / peak if peak else 0.0
            x, y = left + j * cell, top + i * cell
            colour = "#ffffff" if frac > 0.6 else "#222222"
            body.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                        f'fill="{_shade(frac)}" stroke="#555555"/>')
            body.append(f'<text x="{x + cell // 2}" y="{y + cell // 2 + 9}" text-anchor="middle" '
                        f'font-size="26" fill="{colour}">{count}</text>')
        correct = row[i]
        body.append(f'<text x="{left + 2 * cell + 10}" y="{top + i * cell + cell // 2 + 5}" '
                    f'font-size="12">{correct} out of {sum(row)}</text>')
    return _svg(left + 2 * cell + 100, top + 2 * cell + 40, body)


def render_importance_svg(ranking: ImportanceRanking, top_k: int | None = None,
                          title: str = "Feature Importance") -> bytes:
    """Horizontal bars, largest first; the largest importance spans the full bar width."""
    items = list(ranking.items if top_k is None else ranking.items[:top_k])
    if not items:
        raise DataError("cannot render an empty importance ranking")
    bar_w, bar_h, gap, label_w, top = 360, 18, 6, 220, 44
    peak = max(v for _, v in items)
    body = [f'<text x="{(label_w + bar_w) // 2}" y="26" text-anchor="middle" font-size="16">{escape(title)}</text>']
    for i, (name, value) in enumerate(items):
        y = top + i * (bar_h + gap)
        width = bar_w * value / peak if peak > 0 else 0.0
        body.append(f'<text x="{label_w - 8}" y="{y + bar_h - 4}" text-anchor="end" font-size="12">{escape(name)}</text>')
        body.append(f'<rect x="{label_w}" y="{y}" width="{jsonfmt.format_float(width, None)}" height="{bar_h}" '
                    f'fill="#4682b4"><title>{escape(name)}: {value:.4f}</title></rect>')
        body.append(f'<text x="{label_w + width + 4:.2f}" y="{y + bar_h - 4}" font-size="11">{value:.3f}</text>')
    return _svg(label_w + bar_w + 60, top + len(items) * (bar_h + gap) + 10, body)


@dataclass(frozen=True)
class ScatterRow:
    respondent_id: str
    text_length_norm: float
    logic_score: float
    predicted_label: str
    jitter_x: float
    jitter_y: float


def _jitter(seed: int, respondent_id: str) -> tuple[float, float]:
    rng = Rng(derive_seed(seed, "jitter", respondent_id))
    return rng.uniform(-JITTER, JITTER), rng.uniform(-JITTER, JITTER)


def scatter_rows(logic_reports: Sequence[LogicReport], text_reports: Sequence[TextScoreReport],
                 predictions: Sequence[str], seed: int = 0) -> list[ScatterRow]:
    """One point per respondent: mean free-text length score vs logic score, with seeded jitter."""
    if not len(logic_reports) == len(text_reports) == len(predictions):
        raise DimensionMismatch("scatter inputs differ in length")
    rows = []
    for lr, tr, pred in zip(logic_reports, text_reports, predictions):
        if lr.respondent_id != tr.respondent_id:
            raise DimensionMismatch(f"logic report {lr.respondent_id!r} aligned with text report {tr.respondent_id!r}")
        jx, jy = _jitter(seed, lr.respondent_id)
        rows.append(ScatterRow(lr.respondent_id, tr.length_score, lr.logic_score, str(pred), jx, jy))
    return rows


def _write_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue().encode("utf-8")


def scatter_csv(rows: Sequence[ScatterRow]) -> bytes:
    f = lambda x: jsonfmt.format_float(x, None)  # noqa: E731
    return _write_csv(SCATTER_COLUMNS, [
        (r.respondent_id, f(r.text_length_norm), f(r.logic_score), r.predicted_label, f(r.jitter_x), f(r.jitter_y))
        for r in rows
    ])


def scatter_inputs_csv(verdicts) -> bytes:
    """Per-respondent inputs for :func:`scatter_rows`, as written by ``train``/``eval``."""
    f = lambda x: jsonfmt.format_float(x, None)  # noqa: E731
    return _write_csv(SCATTER_INPUT_COLUMNS, [
        (v.respondent_id, f(v.logic_score), f(v.text.length_score), v.verdict) for v in verdicts
    ])


def read_scatter_inputs(data: bytes) -> tuple[list[LogicReport], list[TextScoreReport], list[str]]:
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    missing = set(SCATTER_INPUT_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise DataError(f"scatter inputs lack columns: {sorted(missing)}")
    logic, texts, preds = [], [], []
    for row in reader:
        try:
            score, length = float(row["logic_score"]), float(row["length_score"])
        except ValueError as exc:
            raise DataError(f"line {reader.line_num}: {exc}") from exc
        rid = row["respondent_id"]
        logic.append(LogicReport(rid, [], 0.0, 0, score, False))
        texts.append(TextScoreReport(rid, 1.0, length, 0.0))
        preds.append(row["predicted_label"])
    return logic, texts, preds


def metrics_table(reports: Sequence[EvalReport]) -> str:
    """Plain-text accuracy / fake-class precision, recall, F1 table rounded to 2 decimals."""
    lines = [f"{'Model':<10} {'Acc.':>5} {'Prec.':>5} {'Rec.':>5} {'F1':>5}"]
    for r in reports:
        m = r.metrics
        if m is None:
            lines.append(f"{r.model:<10} {'-':>5} {'-':>5} {'-':>5} {'-':>5}")
            continue
        lines.append(f"{r.model:<10} {m.accuracy:5.2f} {m.fake.precision:5.2f} {m.fake.recall:5.2f} {m.fake.f1:5.2f}")
    return "\n".join(lines)


def write_report(out_dir: str | Path, report: EvalReport, scatter: Sequence[ScatterRow] | None = None,
                 top_k: int = 15) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "eval.json"]
    written[0].write_bytes(emit_eval_json(report))
    if report.confusion.total:
        path = out / f"confusion_{report.model}.svg"
        path.write_bytes(render_confusion_svg(report.confusion, f"Confusion Matrix - {report.model}"))
        written.append(path)
    if report.importances.items:
        path = out / "importance.svg"
        path.write_bytes(render_importance_svg(report.importances, top_k))
        written.append(path)
    if scatter is not None:
        path = out / "scatter.csv"
        path.write_bytes(scatter_csv(scatter))
        written.append(path)
    return written
