"""From-scratch binary classifiers: Gini forest, logistic regression, Newton-boosted trees."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import DimensionMismatch
from .forest import ForestConfig, RandomForest, train_forest
from .gbt import GbtConfig, GbtModel, staged_log_loss, train_gbt
from .logreg import LogRegConfig, LogRegModel, loss_and_grad, sigmoid, train_logreg
from .tree import Split, Tree, best_split, gini_impurity, train_tree

Classifier = Union[RandomForest, LogRegModel, GbtModel]

GENUINE, FAKE = "genuine", "fake"

_KINDS = {"forest": RandomForest, "logreg": LogRegModel, "gbt": GbtModel}


@dataclass(frozen=True)
class Prediction:
    prob_fake: float
    label: str


def predict(model: Classifier, feature_vector, decision_threshold: float = 0.5) -> Prediction:
    x = np.asarray(feature_vector, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got shape {x.shape}")
    prob = float(model.predict_proba(x[None, :])[0])
    return Prediction(prob, FAKE if prob >= decision_threshold else GENUINE)


def classifier_from_dict(doc: dict) -> Classifier:
    try:
        cls = _KINDS[doc["kind"]]
    except KeyError as exc:
        raise ValueError(f"unknown model kind {doc.get('kind')!r}") from exc
    return cls.from_dict(doc)


def train(kind: str, dataset, config=None, n_jobs: int = 1) -> Classifier:
    if kind == "forest":
        return train_forest(dataset, config or ForestConfig(), n_jobs=n_jobs)
    if kind == "logreg":
        return train_logreg(dataset, config or LogRegConfig())
    if kind == "gbt":
        return train_gbt(dataset, config or GbtConfig())
    raise ValueError(f"unknown model kind {kind!r}")


__all__ = [
    "Classifier", "ForestConfig", "GbtConfig", "GbtModel", "LogRegConfig", "LogRegModel",
    "Prediction", "RandomForest", "Split", "Tree", "best_split", "classifier_from_dict",
    "gini_impurity", "loss_and_grad", "predict", "sigmoid", "staged_log_loss", "train",
    "train_forest", "train_gbt", "train_logreg", "train_tree", "FAKE", "GENUINE",
]
