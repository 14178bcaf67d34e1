"""Principal component analysis via singular value decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PcaModel:
    """Column means, top-d orthonormal components (rows), and the sample
    variance explained by each component, sorted descending."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    total_variance: float

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        if self.total_variance <= 0.0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / self.total_variance


def pca_fit(X: np.ndarray, d: int) -> PcaModel:
    """Top-d principal directions of the sample covariance of X.

    Sign convention: each component's largest-magnitude entry is positive.
    d is capped at min(n - 1, m); larger requests are a hard error rather
    than silently padded.
    """
    X = np.asarray(X, dtype=np.float64)
    n, m = X.shape
    if not 1 <= d <= min(n - 1, m):
        raise ValueError(f"d={d} outside [1, min(n-1={n - 1}, m={m})]")
    mean = X.mean(axis=0)
    Xc = X - mean
    _, S, Vt = np.linalg.svd(Xc, full_matrices=False)
    components = Vt[:d].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    var = S ** 2 / (n - 1)
    return PcaModel(mean, components, var[:d], float(var.sum()))


def pca_transform(model: PcaModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != model.mean.shape[0]:
        raise ValueError(
            f"matrix has {X.shape[1]} columns, model expects {model.mean.shape[0]}"
        )
    return (X - model.mean) @ model.components.T
