"""Exact (dense) t-distributed stochastic neighbor embedding.

High-dimensional affinities use per-point Gaussian bandwidths calibrated to
a target perplexity; low-dimensional affinities use the Student-t kernel
with one degree of freedom.  The optimizer is plain gradient descent with a
two-stage momentum schedule, early exaggeration, and a PCA initialization
scaled to a tiny spread.
"""

from __future__ import annotations

import numpy as np

from seqreduce import kernels
from seqreduce.reduce._types import Embedding, ReductionSpec
from seqreduce.reduce.pca import pca_fit, pca_transform

EXAGGERATION = 12.0
EXAGGERATION_ITERS = 50
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
MOMENTUM_SWITCH_ITER = 20
INIT_STD = 1e-4


def joint_probabilities(X: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized affinity matrix p_ij = (p_{j|i} + p_{i|j}) / (2n)."""
    d2 = kernels.pairwise_sq_dists(X)
    cond = kernels.tsne_calibrate(d2, perplexity)
    n = X.shape[0]
    return (cond + cond.T) / (2.0 * n)


def _pca_init(X: np.ndarray, d: int, seed: int) -> np.ndarray:
    coords = pca_transform(pca_fit(X, d), X)
    s = coords[:, 0].std()
    if s > 0.0:
        return coords * (INIT_STD / s)
    # degenerate input (first component has zero spread): tiny seeded cloud
    from seqreduce.seeding import rng_for

    return rng_for(seed, "tsne-init").normal(0.0, INIT_STD, size=coords.shape)


def tsne_embed(X: np.ndarray, spec: ReductionSpec) -> Embedding:
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 4:
        raise ValueError(f"need at least 4 points, got {n}")
    p = spec.tsne
    if p.perplexity >= n:
        raise ValueError(f"perplexity {p.perplexity} must be below the point count {n}")
    P = joint_probabilities(X, p.perplexity)
    P12 = P * EXAGGERATION
    Y = _pca_init(X, spec.target_dim, spec.seed)
    update = np.zeros_like(Y)
    exag_end = min(EXAGGERATION_ITERS, p.n_iter)
    initial_kl = None
    for it in range(p.n_iter):
        target = P12 if it < exag_end else P
        kl, grad = kernels.tsne_kl_grad(target, Y)
        if it == exag_end:
            initial_kl = kl
        momentum = MOMENTUM_EARLY if it < MOMENTUM_SWITCH_ITER else MOMENTUM_LATE
        update = momentum * update - p.learning_rate * grad
        Y = Y + update
        Y = Y - Y.mean(axis=0)
    final_kl, _ = kernels.tsne_kl_grad(P, Y)
    if initial_kl is None:
        initial_kl = final_kl
    return Embedding(
        coords=Y,
        spec=spec,
        diagnostics={"initial_kl": float(initial_kl), "final_kl": float(final_kl)},
    )
