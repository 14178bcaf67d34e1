"""K-means clustering and the label-based clustering accuracy metric.

Accuracy of a clustering against ground-truth labels: each cluster predicts
its most frequent true label (ties toward the smaller label value), and the
score is the fraction of points whose cluster's prediction matches their own
label.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from seqreduce import kernels
from seqreduce.seeding import rng_for

NO_LABEL = -1


@dataclass(frozen=True)
class KmeansParams:
    k: int
    n_init: int = 10
    max_iter: int = 300
    tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.n_init <= 0 or self.max_iter <= 0:
            raise ValueError("n_init and max_iter must be positive")


@dataclass(frozen=True)
class KmeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    inertia_history: np.ndarray
    predictor: np.ndarray | None = None

    def with_predictor(self, labels: np.ndarray) -> "KmeansResult":
        k = self.centroids.shape[0]
        return replace(self, predictor=majority_predictor(self.assignments, labels, k))


def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seed centroids: first uniform, then proportional to squared distance
    from the nearest centroid chosen so far."""
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[rng.integers(n)]
    d2 = np.einsum("ij,ij->i", X - centroids[0], X - centroids[0])
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[j] = X[idx]
        cand = np.einsum("ij,ij->i", X - centroids[j], X - centroids[j])
        np.minimum(d2, cand, out=d2)
    return centroids


def kmeans(X: np.ndarray, params: KmeansParams) -> KmeansResult:
    """Lloyd's algorithm with k-means++ seeding and n_init restarts; the
    restart with the lowest final inertia wins (ties toward the earlier
    restart).  An emptied cluster is repaired by taking the point farthest
    from its current centroid."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    if params.k > n:
        raise ValueError(f"k={params.k} exceeds the point count {n}")
    if not np.isfinite(X).all():
        raise ValueError("input contains non-finite values")
    best = None
    for restart in range(params.n_init):
        rng = rng_for(params.seed, "kmeans", restart)
        init = _kmeanspp_init(X, params.k, rng)
        assign, cent, history = kernels.lloyd(X, init, params.max_iter, params.tol)
        inertia = float(history[-1])
        if best is None or inertia < best[0]:
            best = (inertia, assign, cent, history)
    inertia, assign, cent, history = best
    return KmeansResult(
        assignments=assign,
        centroids=cent,
        inertia=inertia,
        inertia_history=np.asarray(history),
    )


def majority_predictor(assignments: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Per-cluster most frequent label; ties go to the smaller label value,
    clusters with no points get the NO_LABEL sentinel."""
    assignments = np.asarray(assignments, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if assignments.shape[0] != labels.shape[0]:
        raise ValueError("assignments and labels must have equal length")
    if labels.size and labels.min() < 0:
        raise ValueError("labels must be non-negative")
    predictor = np.full(k, NO_LABEL, dtype=np.int64)
    for j in range(k):
        members = labels[assignments == j]
        if members.size:
            predictor[j] = int(np.argmax(np.bincount(members)))
    return predictor


def clustering_accuracy(assignments: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Fraction of points whose cluster's majority label equals their own."""
    predictor = majority_predictor(assignments, labels, k)
    assignments = np.asarray(assignments, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    return float(np.mean(predictor[assignments] == labels))
