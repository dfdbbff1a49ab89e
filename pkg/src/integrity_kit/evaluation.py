"""Stratified splitting, confusion matrices, per-class metrics and Gini importances.

Label convention throughout: 0 = genuine, 1 = fake (the positive class).
"""
from __future__ import annotations

from decimal import ROUND_FLOOR, Decimal
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, DimensionMismatch
from .ingest import Dataset
from .rng import Rng


def round_half_up(fraction: float, count: int) -> int:
    """``fraction * count`` rounded half up, computed on the decimal value of ``fraction``.

    Binary floating point would put 0.29 * 50 at 14.499999999999998 and round
    it down; the decimal product is exactly 14.5 and rounds to 15.
    """
    exact = Decimal(repr(float(fraction))) * count
    return int((exact + Decimal("0.5")).to_integral_value(rounding=ROUND_FLOOR))


def class_test_count(class_size: int, test_fraction: float) -> int:
    """Test-set share of one class: round-half-up, but at least 1 when the class has 2+ members."""
    k = round_half_up(test_fraction, class_size)
    if class_size >= 2:
        k = max(k, 1)
    return min(k, class_size)


def stratified_indices(labels: Sequence[int], test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Train/test row indices, each returned in ascending order.

    Classes are visited in ascending label order and shuffled with a single
    seeded stream; the first ``class_test_count`` of each shuffled class go to test.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    labels = np.asarray(labels, dtype=int)
    rng = Rng(seed)
    test: list[int] = []
    for cls in sorted(set(labels.tolist())):
        members = np.flatnonzero(labels == cls).tolist()
        rng.shuffle(members)
        test.extend(members[: class_test_count(len(members), test_fraction)])
    test_idx = np.array(sorted(test), dtype=int)
    train_mask = np.ones(len(labels), dtype=bool)
    train_mask[test_idx] = False
    return np.flatnonzero(train_mask), test_idx


def stratified_split(dataset: Dataset, test_fraction: float = 0.2, seed: int = 0) -> tuple[Dataset, Dataset]:
    if dataset.labels is None:
        raise DataError("stratified split needs labels")
    train_idx, test_idx = stratified_indices(dataset.labels, test_fraction, seed)
    return dataset.subset(train_idx), dataset.subset(test_idx)


@dataclass(frozen=True)
class ConfusionMatrix:
    tn: int = 0  # genuine predicted genuine
    fp: int = 0  # genuine predicted fake
    fn: int = 0  # fake predicted genuine
    tp: int = 0  # fake predicted fake

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    def to_dict(self) -> dict[str, int]:
        return {"tn": self.tn, "fp": self.fp, "fn": self.fn, "tp": self.tp}


def confusion(predictions: Sequence[int], labels: Sequence[int]) -> ConfusionMatrix:
    pred = np.asarray(predictions, dtype=int)
    true = np.asarray(labels, dtype=int)
    if pred.shape != true.shape:
        raise DimensionMismatch(f"{pred.size} predictions for {true.size} labels")
    return ConfusionMatrix(
        tn=int(np.sum((true == 0) & (pred == 0))),
        fp=int(np.sum((true == 0) & (pred == 1))),
        fn=int(np.sum((true == 1) & (pred == 0))),
        tp=int(np.sum((true == 1) & (pred == 1))),
    )


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass(frozen=True)
class PerClass:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassMetrics:
    accuracy: float
    genuine: PerClass
    fake: PerClass

    def per_class_dict(self) -> dict:
        return {
            name: {"precision": m.precision, "recall": m.recall, "f1": m.f1, "support": m.support}
            for name, m in (("genuine", self.genuine), ("fake", self.fake))
        }


def class_metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """Accuracy and per-class precision/recall/F1, with 0/0 taken as 0."""
    if cm.total == 0:
        raise DataError("metrics are undefined for an empty confusion matrix")
    fp_, fr = _ratio(cm.tp, cm.tp + cm.fp), _ratio(cm.tp, cm.tp + cm.fn)
    gp, gr = _ratio(cm.tn, cm.tn + cm.fn), _ratio(cm.tn, cm.tn + cm.fp)
    return ClassMetrics(
        accuracy=(cm.tn + cm.tp) / cm.total,
        genuine=PerClass(gp, gr, _f1(gp, gr), cm.tn + cm.fp),
        fake=PerClass(fp_, fr, _f1(fp_, fr), cm.tp + cm.fn),
    )


@dataclass(frozen=True)
class ImportanceRanking:
    """(feature name, importance) pairs, largest first; ties ordered by name."""

    items: tuple[tuple[str, float], ...]

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.items]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.items]

    def top(self, k: int) -> "ImportanceRanking":
        return ImportanceRanking(self.items[:k])

    def to_list(self) -> list[dict]:
        return [{"feature": name, "value": v} for name, v in self.items]

    @classmethod
    def from_values(cls, names: Sequence[str], values: Sequence[float]) -> "ImportanceRanking":
        pairs = sorted(zip(names, (float(v) for v in values)), key=lambda p: (-p[1], p[0]))
        return cls(tuple(pairs))


def gini_importance(model, feature_names: Sequence[str] | None = None) -> ImportanceRanking:
    """Sample-weighted split-gain importance summed over the model's trees.

    Each internal node adds ``(node samples / root samples) * gain`` to its
    feature; totals are normalized to sum to 1 unless every one is zero.
    Works for any model exposing ``trees`` and ``n_features``; for boosted
    trees the gain is the Newton gain.
    """
    totals = np.zeros(model.n_features)
    for tree in model.trees:
        inner = np.flatnonzero(tree.feature >= 0)
        np.add.at(totals, tree.feature[inner], tree.n_samples[inner] / tree.n_samples[0] * tree.gain[inner])
    s = totals.sum()
    if s > 0:
        totals = totals / s
    names = list(feature_names) if feature_names is not None else [f"f{i}" for i in range(model.n_features)]
    if len(names) != model.n_features:
        raise DimensionMismatch(f"{len(names)} names for {model.n_features} features")
    return ImportanceRanking.from_values(names, totals)


@dataclass
class EvalReport:
    model: str
    confusion: ConfusionMatrix
    metrics: ClassMetrics | None
    importances: ImportanceRanking = field(default_factory=lambda: ImportanceRanking(()))
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        m = self.metrics
        return {
            "model": self.model,
            "confusion": self.confusion.to_dict(),
            "accuracy": m.accuracy if m else 0.0,
            "per_class": m.per_class_dict() if m else {},
            "importances": self.importances.to_list(),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EvalReport":
        cm = ConfusionMatrix(**{k: int(doc["confusion"][k]) for k in ("tn", "fp", "fn", "tp")})
        imps = doc.get("importances", [])
        return cls(
            model=doc["model"],
            confusion=cm,
            metrics=class_metrics(cm) if cm.total else None,
            importances=ImportanceRanking.from_values([i["feature"] for i in imps], [i["value"] for i in imps]),
            warnings=list(doc.get("warnings", [])),
        )


def evaluate(model_name: str, predictions: Sequence[int], labels: Sequence[int],
             importances: ImportanceRanking | None = None, warnings: Sequence[str] = ()) -> EvalReport:
    cm = confusion(predictions, labels)
    return EvalReport(
        model=model_name,
        confusion=cm,
        metrics=class_metrics(cm) if cm.total else None,
        importances=importances or ImportanceRanking(()),
        warnings=list(warnings),
    )
