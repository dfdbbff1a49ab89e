"""L2-regularized logistic regression trained by full-batch gradient descent."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DataError
from ..ingest import Dataset


def sigmoid(z):
    """Logistic function, evaluated without overflow for large |z|."""
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    out = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class LogRegConfig:
    lr: float = 0.1
    epochs: int = 500
    l2: float = 0.01


def loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean cross-entropy + (l2/2)||w||^2 and its gradient with respect to (w, b).

    ``X`` is expected already standardized.
    """
    z = X @ w + b
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * float(w @ w)
    resid = sigmoid(z) - y
    return float(loss), X.T @ resid / len(y) + l2 * w, float(np.mean(resid))


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    std: np.ndarray
    config: LogRegConfig = LogRegConfig()

    kind = "logreg"

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def standardize(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float).reshape(-1, self.n_features) - self.mean) / self.std

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        Xz = self.standardize(X)
        # column-by-column sum instead of a BLAS matmul: batch size must not change the rounding
        z = np.full(Xz.shape[0], self.bias)
        for j, w in enumerate(self.weights):
            z += Xz[:, j] * w
        return sigmoid(z)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": asdict(self.config),
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LogRegModel":
        return cls(
            np.asarray(doc["weights"], dtype=float),
            float(doc["bias"]),
            np.asarray(doc["mean"], dtype=float),
            np.asarray(doc["std"], dtype=float),
            LogRegConfig(**doc["config"]),
        )


def train_logreg(dataset: Dataset, config: LogRegConfig = LogRegConfig()) -> LogRegModel:
    if dataset.n == 0:
        raise DataError("cannot train on an empty dataset")
    if dataset.labels is None:
        raise DataError("training needs labels")
    X, y = dataset.rows, dataset.labels.astype(float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0] = 1.0
    Xz = (X - mean) / std
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(config.epochs):
        _, gw, gb = loss_and_grad(w, b, Xz, y, config.l2)
        w -= config.lr * gw
        b -= config.lr * gb
    return LogRegModel(w, b, mean, std, config)
