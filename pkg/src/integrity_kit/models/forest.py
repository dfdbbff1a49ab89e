"""Random forest of Gini trees with platform-independent seeding."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from math import isqrt

import numpy as np

from ..errors import DataError
from ..ingest import Dataset
from ..rng import Rng, derive_seed
from .tree import Tree, train_tree


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 5
    min_samples_split: int = 2
    max_features: int | None = None  # None -> floor(sqrt(d)), at least 1
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.max_depth < 1:
            raise ValueError("n_trees and max_depth must be at least 1")

    def features_per_split(self, d: int) -> int:
        k = self.max_features if self.max_features is not None else isqrt(d)
        return max(1, min(k, d))


@dataclass
class RandomForest:
    trees: list[Tree]
    config: ForestConfig
    n_features: int

    kind = "forest"

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Mean of the trees' leaf fake-fractions."""
        X = np.asarray(X, dtype=float).reshape(-1, self.n_features)
        # accumulate tree by tree so a row's result does not depend on batch size
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": asdict(self.config),
            "n_features": self.n_features,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RandomForest":
        return cls([Tree.from_dict(t) for t in doc["trees"]], ForestConfig(**doc["config"]), int(doc["n_features"]))


def _grow_one(X: np.ndarray, y: np.ndarray, config: ForestConfig, t: int) -> Tree:
    n, d = X.shape
    if config.bootstrap:
        draw = Rng(derive_seed(config.seed, t))
        idx = np.array(draw.integers_many(n, n), dtype=int)
    else:
        idx = np.arange(n)
    return train_tree(
        X[idx],
        y[idx],
        max_depth=config.max_depth,
        min_samples_split=config.min_samples_split,
        features_per_split=config.features_per_split(d),
        rng=Rng(derive_seed(config.seed, t, "feat")),
    )


def train_forest(dataset: Dataset, config: ForestConfig = ForestConfig(), n_jobs: int = 1) -> RandomForest:
    """Fit ``config.n_trees`` trees on bootstrap resamples.

    Tree ``t`` draws its bootstrap from ``derive_seed(seed, t)`` and its
    feature subsets from ``derive_seed(seed, t, "feat")``, so the result is
    the same for any ``n_jobs``.
    """
    if dataset.n == 0:
        raise DataError("cannot train a forest on an empty dataset")
    if dataset.labels is None:
        raise DataError("training needs labels")
    X, y = dataset.rows, dataset.labels.astype(float)
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(lambda t: _grow_one(X, y, config, t), range(config.n_trees)))
    else:
        trees = [_grow_one(X, y, config, t) for t in range(config.n_trees)]
    return RandomForest(trees, config, dataset.d)
