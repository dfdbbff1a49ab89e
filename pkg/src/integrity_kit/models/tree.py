"""Binary classification trees grown on Gini impurity.

Trees are stored as flat node arrays (the layout scikit-learn uses):
node 0 is the root, ``feature[i] == -1`` marks a leaf, and an internal node
sends ``x[feature[i]] <= threshold[i]`` to ``left[i]``.  ``value[i]`` is the
fraction of fake samples that reached the node during training (for
boosted regression trees it holds the Newton leaf weight instead).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import DataError
from ..rng import Rng

# Gains closer than this count as ties; exact gain differences on n <= 10^3
# samples are orders of magnitude larger.
GAIN_TOL = 1e-12


def gini_impurity(class_counts: Sequence[float]) -> float:
    """1 - p0^2 - p1^2 for a (genuine, fake) count pair."""
    n0, n1 = class_counts
    total = n0 + n1
    if total <= 0:
        raise DataError("gini impurity is undefined for an empty node")
    p0, p1 = n0 / total, n1 / total
    return 1.0 - p0 * p0 - p1 * p1


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


def _pick(best: Split | None, feature: int, xs: np.ndarray, cut: np.ndarray, gains: np.ndarray) -> Split | None:
    """Fold one feature's candidate gains into the running best split.

    Features arrive in increasing index order, so keeping the incumbent on
    ties implements the lower-index rule; within a feature the first cut
    within tolerance of the maximum is the lowest threshold.
    """
    gmax = gains.max()
    if gmax <= GAIN_TOL or (best is not None and gmax <= best.gain + GAIN_TOL):
        return best
    i = int(np.argmax(gains >= gmax - GAIN_TOL))
    c = cut[i]
    return Split(feature, float((xs[c] + xs[c + 1]) / 2.0), float(gains[i]))


def _sorted_cuts(col: np.ndarray):
    order = np.argsort(col, kind="stable")
    xs = col[order]
    cut = np.flatnonzero(xs[:-1] < xs[1:])
    return order, xs, cut


def best_split(rows: np.ndarray, labels: np.ndarray, candidate_features: Iterable[int]) -> Split | None:
    """Highest-gain midpoint split over ``candidate_features``, or ``None`` if nothing helps."""
    y = np.asarray(labels, dtype=float)
    n = len(y)
    pos = y.sum()
    if n < 2:
        return None
    parent = gini_impurity((n - pos, pos))
    best = None
    for f in sorted(candidate_features):
        order, xs, cut = _sorted_cuts(rows[:, f])
        if cut.size == 0:
            continue
        pl = np.cumsum(y[order])[cut]
        nl = cut + 1.0
        nr = n - nl
        pr = pos - pl
        # n * weighted child impurity = n - score
        score = (pl * pl + (nl - pl) ** 2) / nl + (pr * pr + (nr - pr) ** 2) / nr
        best = _pick(best, f, xs, cut, parent - (1.0 - score / n))
    return best


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    gain: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        def walk(i: int) -> int:
            if self.feature[i] < 0:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))

        return walk(0)

    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.feature < 0)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row of ``X``."""
        node = np.zeros(X.shape[0], dtype=int)
        rows = np.arange(X.shape[0])
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return node
            go_left = X[rows, np.where(inner, f, 0)] <= self.threshold[node]
            node = np.where(inner, np.where(go_left, self.left[node], self.right[node]), node)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(np.asarray(X, dtype=float))]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
            "gain": self.gain.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Tree":
        ints = ("feature", "left", "right", "n_samples")
        return cls(**{k: np.asarray(doc[k], dtype=int if k in ints else float) for k in cls.__dataclass_fields__})


@dataclass
class TreeBuilder:
    """Accumulates nodes in preorder while a tree is grown."""

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)
    n_samples: list = field(default_factory=list)
    gain: list = field(default_factory=list)

    def leaf(self, value: float, n: int) -> int:
        for name, v in (("feature", -1), ("threshold", 0.0), ("left", -1), ("right", -1),
                        ("value", float(value)), ("n_samples", int(n)), ("gain", 0.0)):
            getattr(self, name).append(v)
        return len(self.feature) - 1

    def split(self, node: int, split: Split) -> None:
        self.feature[node] = split.feature
        self.threshold[node] = split.threshold
        self.gain[node] = split.gain

    def build(self) -> Tree:
        ints = ("feature", "left", "right", "n_samples")
        return Tree(**{k: np.asarray(getattr(self, k), dtype=int if k in ints else float) for k in Tree.__dataclass_fields__})


def train_tree(
    rows: np.ndarray,
    labels: np.ndarray,
    max_depth: int = 5,
    min_samples_split: int = 2,
    features_per_split: int | None = None,
    rng: Rng | None = None,
) -> Tree:
    """Grow a Gini tree depth-first.

    A node becomes a leaf when it is pure, at ``max_depth``, smaller than
    ``min_samples_split`` or when no candidate split has positive gain.
    With ``features_per_split < d`` each node draws its candidate features
    from ``rng``.
    """
    X = np.asarray(rows, dtype=float)
    y = np.asarray(labels, dtype=float)
    n, d = X.shape
    if n < 1:
        raise DataError("cannot grow a tree on zero rows")
    k = d if features_per_split is None else max(1, min(features_per_split, d))
    if k < d and rng is None:
        raise ValueError("feature subsampling needs an rng")
    out = TreeBuilder()

    def grow(idx: np.ndarray, depth: int) -> int:
        yy = y[idx]
        pos = yy.sum()
        node = out.leaf(pos / len(idx), len(idx))
        if depth >= max_depth or len(idx) < min_samples_split or pos == 0 or pos == len(idx):
            return node
        feats = range(d) if k >= d else rng.sample(d, k)
        split = best_split(X[idx], yy, feats)
        if split is None:
            return node
        out.split(node, split)
        go_left = X[idx, split.feature] <= split.threshold
        out.left[node] = grow(idx[go_left], depth + 1)
        out.right[node] = grow(idx[~go_left], depth + 1)
        return node

    grow(np.arange(n), 0)
    return out.build()
