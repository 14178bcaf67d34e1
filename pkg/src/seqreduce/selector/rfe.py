"""Recursive feature elimination under a linear softmax base estimator.

The estimator is L2-regularized multinomial logistic regression trained by
full-batch adaptive-moment updates from a zero initialization, which makes
every elimination round deterministic.  Features are ranked by the L2 norm
of their weight vector across classes; the weakest ceil(step_fraction *
surviving) features are dropped each round, never dropping below n_keep.
"""

from __future__ import annotations

import math

import numpy as np

_L2 = 0.01
_LR = 0.1
_ITERS = 300
_ADAM_B1 = 0.9
_ADAM_B2 = 0.999
_ADAM_EPS = 1e-8


def _softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def linear_softmax_fit(X: np.ndarray, y: np.ndarray, n_classes: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights (features x classes) and biases of the regularized linear
    classifier; deterministic (zero init, full-batch updates)."""
    n, m = X.shape
    W = np.zeros((m, n_classes))
    b = np.zeros(n_classes)
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    mW = np.zeros_like(W); vW = np.zeros_like(W)
    mb = np.zeros_like(b); vb = np.zeros_like(b)
    for t in range(1, _ITERS + 1):
        P = _softmax(X @ W + b)
        G = (P - Y) / n
        dW = X.T @ G + _L2 * W
        db = G.sum(axis=0)
        for param, grad, m1, v1 in ((W, dW, mW, vW), (b, db, mb, vb)):
            m1 *= _ADAM_B1; m1 += (1 - _ADAM_B1) * grad
            v1 *= _ADAM_B2; v1 += (1 - _ADAM_B2) * grad ** 2
            mhat = m1 / (1 - _ADAM_B1 ** t)
            vhat = v1 / (1 - _ADAM_B2 ** t)
            param -= _LR * mhat / (np.sqrt(vhat) + _ADAM_EPS)
    return W, b


def rfe_select(X: np.ndarray, y: np.ndarray, n_keep: int,
               step_fraction: float = 0.1) -> np.ndarray:
    """Boolean mask with exactly n_keep true entries."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, m = X.shape
    if not 1 <= n_keep <= m:
        raise ValueError(f"n_keep {n_keep} outside [1, {m}]")
    if not 0 < step_fraction <= 1:
        raise ValueError("step_fraction must be in (0, 1]")
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("RFE needs at least 2 classes")
    n_classes = int(classes.max()) + 1
    mask = np.ones(m, dtype=bool)
    while int(mask.sum()) > n_keep:
        surviving = int(mask.sum())
        W, _ = linear_softmax_fit(X[:, mask], y, n_classes)
        norms = np.linalg.norm(W, axis=1)
        n_drop = min(math.ceil(step_fraction * surviving), surviving - n_keep)
        weakest = np.argsort(norms, kind="stable")[:n_drop]
        alive = np.flatnonzero(mask)
        mask[alive[weakest]] = False
    return mask
