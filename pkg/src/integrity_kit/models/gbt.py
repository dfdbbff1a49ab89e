"""Newton-boosted regression trees for the logistic loss.

A small analogue of XGBoost's exact greedy algorithm: every round fits a
depth-limited tree to the gradients ``g = p - y`` and hessians
``h = p(1 - p)`` of the current model, scoring splits by

    gain = 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)]

and setting leaf weights to ``-G/(H+lambda)``.  No column subsampling,
no histogram binning, no missing-value routing.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from ..errors import DataError
from ..ingest import Dataset
from .logreg import sigmoid
from .tree import Split, Tree, TreeBuilder, _pick, _sorted_cuts

BASE_SCORE_CLAMP = 10.0


@dataclass(frozen=True)
class GbtConfig:
    rounds: int = 50
    max_depth: int = 3
    learning_rate: float = 0.1
    reg_lambda: float = 1.0
    min_samples_split: int = 2


@dataclass
class GbtModel:
    base_score: float
    trees: list[Tree]
    config: GbtConfig
    n_features: int

    kind = "gbt"

    def margin(self, X: np.ndarray, rounds: int | None = None) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.n_features)
        out = np.full(X.shape[0], self.base_score)
        for tree in self.trees[:rounds]:
            out += self.config.learning_rate * tree.predict(X)
        return out

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.margin(X))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": asdict(self.config),
            "n_features": self.n_features,
            "base_score": self.base_score,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GbtModel":
        return cls(
            float(doc["base_score"]),
            [Tree.from_dict(t) for t in doc["trees"]],
            GbtConfig(**doc["config"]),
            int(doc["n_features"]),
        )


def newton_split(X: np.ndarray, g: np.ndarray, h: np.ndarray, features: Iterable[int], reg_lambda: float) -> Split | None:
    G, H = g.sum(), h.sum()
    parent = G * G / (H + reg_lambda)
    best = None
    for f in sorted(features):
        order, xs, cut = _sorted_cuts(X[:, f])
        if cut.size == 0:
            continue
        gl = np.cumsum(g[order])[cut]
        hl = np.cumsum(h[order])[cut]
        gr, hr = G - gl, H - hl
        gains = 0.5 * (gl * gl / (hl + reg_lambda) + gr * gr / (hr + reg_lambda) - parent)
        best = _pick(best, f, xs, cut, gains)
    return best


def fit_newton_tree(X: np.ndarray, g: np.ndarray, h: np.ndarray, config: GbtConfig) -> Tree:
    out = TreeBuilder()
    d = X.shape[1]
    lam = config.reg_lambda

    def grow(idx: np.ndarray, depth: int) -> int:
        gg, hh = g[idx], h[idx]
        node = out.leaf(-gg.sum() / (hh.sum() + lam), len(idx))
        if depth >= config.max_depth or len(idx) < config.min_samples_split:
            return node
        split = newton_split(X[idx], gg, hh, range(d), lam)
        if split is None:
            return node
        out.split(node, split)
        go_left = X[idx, split.feature] <= split.threshold
        out.left[node] = grow(idx[go_left], depth + 1)
        out.right[node] = grow(idx[~go_left], depth + 1)
        return node

    grow(np.arange(X.shape[0]), 0)
    return out.build()


def base_log_odds(y: np.ndarray) -> float:
    p = float(np.mean(y))
    if p <= 0.0:
        return -BASE_SCORE_CLAMP
    if p >= 1.0:
        return BASE_SCORE_CLAMP
    return float(np.clip(np.log(p / (1.0 - p)), -BASE_SCORE_CLAMP, BASE_SCORE_CLAMP))


def train_gbt(dataset: Dataset, config: GbtConfig = GbtConfig()) -> GbtModel:
    if dataset.n == 0:
        raise DataError("cannot train on an empty dataset")
    if dataset.labels is None:
        raise DataError("training needs labels")
    X, y = dataset.rows, dataset.labels.astype(float)
    model = GbtModel(base_log_odds(y), [], config, dataset.d)
    margin = np.full(len(y), model.base_score)
    for _ in range(config.rounds):
        p = sigmoid(margin)
        tree = fit_newton_tree(X, p - y, p * (1.0 - p), config)
        model.trees.append(tree)
        margin += config.learning_rate * tree.predict(X)
    return model


def log_loss(y: np.ndarray, margin: np.ndarray) -> float:
    return float(np.mean(np.logaddexp(0.0, margin) - y * margin))


def staged_log_loss(model: GbtModel, X: np.ndarray, y: np.ndarray) -> list[float]:
    """Training log-loss after 0, 1, ..., len(trees) rounds."""
    y = np.asarray(y, dtype=float)
    return [log_loss(y, model.margin(X, rounds=k)) for k in range(len(model.trees) + 1)]
