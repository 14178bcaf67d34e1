"""Uniform manifold approximation and projection, dense exact variant.

Pipeline: brute-force k-nearest neighbors, per-point bandwidth calibration,
fuzzy union of the directed membership graph, then per-edge stochastic
gradient descent on the fuzzy cross-entropy with negative sampling.  The
low-dimensional kernel is 1 / (1 + a r^(2b)) with (a, b) least-squares
fitted to the min_dist/spread membership curve.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import curve_fit

from seqreduce import kernels
from seqreduce.reduce._types import Embedding, ReductionSpec
from seqreduce.seeding import rng_for

SPECTRAL_INIT_MAX_DIM = 50
_AB_FIT_POINTS = 300
_EPS = 1e-12


@lru_cache(maxsize=None)
def find_ab_params(min_dist: float, spread: float) -> tuple[float, float]:
    """Fit 1/(1 + a x^(2b)) to the target membership curve: 1 for
    x <= min_dist, exp(-(x - min_dist)/spread) beyond."""
    xs = np.linspace(0.0, spread * 3.0, _AB_FIT_POINTS)
    ys = np.where(xs < min_dist, 1.0, np.exp(-(xs - min_dist) / spread))

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2.0 * b))

    (a, b), _ = curve_fit(curve, xs, ys)
    return float(a), float(b)


def knn_graph(X: np.ndarray, n_neighbors: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact nearest neighbors by full pairwise scan.

    Returns (indices, distances), each n x n_neighbors, nearest first,
    self excluded; ties resolved toward the smaller index.
    """
    d2 = kernels.pairwise_sq_dists(X)
    n = d2.shape[0]
    order = np.argsort(d2, axis=1, kind="stable")
    idx = np.empty((n, n_neighbors), dtype=np.int64)
    for i in range(n):
        row = order[i]
        idx[i] = row[row != i][:n_neighbors]
    dists = np.sqrt(np.take_along_axis(d2, idx, axis=1))
    return idx, dists


def membership_strengths(knn_idx: np.ndarray, knn_dists: np.ndarray,
                         sigma: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Directed membership matrix: a[i, j] = exp(-max(0, d_ij - rho_i)/sigma_i)
    for j among i's neighbors, 0 elsewhere."""
    n = knn_idx.shape[0]
    A = np.zeros((n, n))
    w = np.exp(-np.maximum(knn_dists - rho[:, None], 0.0) / sigma[:, None])
    rows = np.repeat(np.arange(n), knn_idx.shape[1])
    A[rows, knn_idx.ravel()] = w.ravel()
    return A


def fuzzy_union(A: np.ndarray) -> np.ndarray:
    """Symmetric weights w = a + a' - a*a' (probabilistic OR of directions)."""
    return A + A.T - A * A.T


def edge_cross_entropy(yi: np.ndarray, yj: np.ndarray, w: float, a: float, b: float) -> float:
    """Fuzzy cross-entropy of one edge at membership w:
    -w log q - (1 - w) log(1 - q) with q = 1/(1 + a r^(2b))."""
    r2 = float(np.sum((yi - yj) ** 2))
    q = 1.0 / (1.0 + a * r2 ** b)
    return float(-w * np.log(max(q, _EPS)) - (1.0 - w) * np.log(max(1.0 - q, _EPS)))


def edge_cross_entropy_grad(yi: np.ndarray, yj: np.ndarray, w: float, a: float, b: float) -> np.ndarray:
    """Analytic gradient of edge_cross_entropy with respect to yi."""
    delta = yi - yj
    r2 = float(np.sum(delta ** 2))
    denom = 1.0 + a * r2 ** b
    attract = 2.0 * a * b * r2 ** (b - 1.0) * w / denom
    repel = -2.0 * b * (1.0 - w) / (max(r2, _EPS) * denom)
    return (attract + repel) * delta


def _spectral_init(W: np.ndarray, d: int) -> np.ndarray:
    """Eigenvectors 1..d of the symmetric normalized graph Laplacian,
    scaled so the largest coordinate magnitude is 10.  Sign convention:
    each column's largest-magnitude entry is positive."""
    n = W.shape[0]
    deg = W.sum(axis=1)
    deg[deg <= 0.0] = 1.0
    dinv = 1.0 / np.sqrt(deg)
    L = np.eye(n) - dinv[:, None] * W * dinv[None, :]
    L = (L + L.T) / 2.0
    _, vecs = eigh(L, subset_by_index=(0, d))
    Y = vecs[:, 1:d + 1].copy()
    for col in Y.T:
        if col[np.argmax(np.abs(col))] < 0:
            col *= -1.0
    peak = np.abs(Y).max()
    if peak > 0.0:
        Y *= 10.0 / peak
    return Y


def _cross_entropy_total(W: np.ndarray, Y: np.ndarray, a: float, b: float) -> float:
    """Dense fuzzy cross-entropy over all unordered pairs (diagnostic)."""
    d2 = kernels.pairwise_sq_dists(Y)
    Q = 1.0 / (1.0 + a * np.maximum(d2, _EPS) ** b)
    np.fill_diagonal(Q, 0.0)
    iu = np.triu_indices_from(W, k=1)
    w = W[iu]
    q = np.clip(Q[iu], _EPS, 1.0 - _EPS)
    pos = np.where(w > 0.0, w * np.log(np.maximum(w, _EPS) / q), 0.0)
    neg = np.where(w < 1.0, (1.0 - w) * np.log(np.maximum(1.0 - w, _EPS) / (1.0 - q)), 0.0)
    return float(np.sum(pos + neg))


def umap_embed(X: np.ndarray, spec: ReductionSpec) -> Embedding:
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    p = spec.umap
    if n <= p.n_neighbors:
        raise ValueError(f"need more than n_neighbors={p.n_neighbors} points, got {n}")
    a, b = find_ab_params(p.min_dist, p.spread)

    knn_idx, knn_dists = knn_graph(X, p.n_neighbors)
    sigma, rho = kernels.smooth_knn(knn_dists, float(np.log2(p.n_neighbors)))
    W = fuzzy_union(membership_strengths(knn_idx, knn_dists, sigma, rho))

    # drop edges revisited less than once over the epoch budget
    w_max = W.max()
    W = np.where(W < w_max / p.n_epochs, 0.0, W)
    head, tail = np.nonzero(W)
    weights = W[head, tail]
    epochs_per_sample = w_max / weights

    if spec.target_dim <= SPECTRAL_INIT_MAX_DIM:
        Y0 = _spectral_init(W, spec.target_dim)
    else:
        Y0 = rng_for(spec.seed, "umap-init").uniform(-10.0, 10.0, size=(n, spec.target_dim))

    n_draws = kernels.count_negative_draws(
        epochs_per_sample, p.negative_sample_rate, p.n_epochs
    )
    neg_indices = rng_for(spec.seed, "umap-neg").integers(0, n, size=n_draws, dtype=np.int32)

    Y = kernels.umap_optimize(
        np.ascontiguousarray(Y0, dtype=np.float64),
        head.astype(np.int64),
        tail.astype(np.int64),
        epochs_per_sample,
        a, b,
        p.repulsion_strength,
        p.negative_sample_rate,
        p.n_epochs,
        neg_indices,
    )
    return Embedding(
        coords=Y,
        spec=spec,
        diagnostics={"final_cross_entropy": _cross_entropy_total(W, Y, a, b)},
    )
