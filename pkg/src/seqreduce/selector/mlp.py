"""Multilayer perceptron trained from scratch for the 3-way method choice.

Architecture: configurable ReLU hidden layers and a softmax output; loss is
mean cross-entropy plus (l2_alpha/2) times the squared weight norm (biases
unpenalized).  Training is minibatch adaptive-moment estimation with a
seeded 10% validation split and early stopping on the validation objective.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from seqreduce.seeding import rng_for
from seqreduce.selector.metrics import evaluate_metrics

_ADAM_B1 = 0.9
_ADAM_B2 = 0.999
_ADAM_EPS = 1e-8


@dataclass(frozen=True)
class MlpConfig:
    hidden_sizes: tuple[int, ...] = (50, 50)
    l2_alpha: float = 0.05
    learning_rate: float = 0.001
    max_epochs: int = 5000
    batch_size: int = 200
    val_fraction: float = 0.1
    patience: int = 10
    min_delta: float = 1e-4


@dataclass(frozen=True)
class MlpModel:
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    config: MlpConfig

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def n_inputs(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_outputs(self) -> int:
        return self.weights[-1].shape[1]


def _softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def _glorot_init(sizes: tuple[int, ...], rng: np.random.Generator):
    """Symmetric uniform init with limit sqrt(6 / (fan_in + fan_out))."""
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _forward(weights, biases, X):
    """Activations per layer; the last entry is the softmax output."""
    acts = [X]
    for i, (W, b) in enumerate(zip(weights, biases)):
        Z = acts[-1] @ W + b
        acts.append(_softmax(Z) if i == len(weights) - 1 else np.maximum(Z, 0.0))
    return acts


def loss_and_grads(weights, biases, X, y_onehot, l2_alpha):
    """Objective (mean cross-entropy + L2 penalty) and its gradients."""
    n = X.shape[0]
    acts = _forward(weights, biases, X)
    probs = acts[-1]
    ce = -np.mean(np.sum(y_onehot * np.log(np.maximum(probs, 1e-300)), axis=1))
    penalty = 0.5 * l2_alpha * sum(float(np.sum(W ** 2)) for W in weights)
    dWs = [None] * len(weights)
    dbs = [None] * len(weights)
    delta = (probs - y_onehot) / n
    for i in range(len(weights) - 1, -1, -1):
        dWs[i] = acts[i].T @ delta + l2_alpha * weights[i]
        dbs[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * (acts[i] > 0.0)
    return ce + penalty, dWs, dbs


def _objective(weights, biases, X, y_onehot, l2_alpha) -> float:
    probs = _forward(weights, biases, X)[-1]
    ce = -np.mean(np.sum(y_onehot * np.log(np.maximum(probs, 1e-300)), axis=1))
    return ce + 0.5 * l2_alpha * sum(float(np.sum(W ** 2)) for W in weights)


def mlp_train(X: np.ndarray, y: np.ndarray, config: MlpConfig, seed: int,
              n_classes: int = 3) -> MlpModel:
    """Fit the network; returns the weights from the best validation epoch."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if not np.isfinite(X).all():
        raise ValueError("input contains non-finite values")
    if np.unique(y).size < 2:
        raise ValueError("training needs at least 2 classes")
    n, m = X.shape
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0

    perm = rng_for(seed, "mlp-val").permutation(n)
    n_val = max(1, int(round(config.val_fraction * n)))
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    if train_idx.size == 0:
        raise ValueError("too few samples for a validation split")
    Xt, Yt = X[train_idx], Y[train_idx]
    Xv, Yv = X[val_idx], Y[val_idx]

    sizes = (m,) + tuple(config.hidden_sizes) + (n_classes,)
    weights, biases = _glorot_init(sizes, rng_for(seed, "mlp-init"))
    mW = [np.zeros_like(W) for W in weights]; vW = [np.zeros_like(W) for W in weights]
    mb = [np.zeros_like(b) for b in biases]; vb = [np.zeros_like(b) for b in biases]

    batch = min(config.batch_size, Xt.shape[0])
    best_val = np.inf
    best_params = None
    stall = 0
    t = 0
    for epoch in range(config.max_epochs):
        order = rng_for(seed, "mlp-shuffle", epoch).permutation(Xt.shape[0])
        for lo in range(0, Xt.shape[0], batch):
            sel = order[lo:lo + batch]
            loss, dWs, dbs = loss_and_grads(weights, biases, Xt[sel], Yt[sel], config.l2_alpha)
            if not np.isfinite(loss):
                raise FloatingPointError("non-finite training loss")
            t += 1
            for params, grads, m1, v1 in ((weights, dWs, mW, vW), (biases, dbs, mb, vb)):
                for i in range(len(params)):
                    m1[i] = _ADAM_B1 * m1[i] + (1 - _ADAM_B1) * grads[i]
                    v1[i] = _ADAM_B2 * v1[i] + (1 - _ADAM_B2) * grads[i] ** 2
                    mhat = m1[i] / (1 - _ADAM_B1 ** t)
                    vhat = v1[i] / (1 - _ADAM_B2 ** t)
                    params[i] = params[i] - config.learning_rate * mhat / (np.sqrt(vhat) + _ADAM_EPS)
        val = _objective(weights, biases, Xv, Yv, config.l2_alpha)
        if val < best_val - config.min_delta:
            best_val = val
            best_params = ([W.copy() for W in weights], [b.copy() for b in biases])
            stall = 0
        else:
            stall += 1
            if stall >= config.patience:
                break
    if best_params is not None:
        weights, biases = best_params
    return MlpModel(tuple(weights), tuple(biases), config)


def mlp_predict(model: MlpModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predicted class indices (argmax, ties toward the earlier class) and
    the full probability rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise ValueError(f"expected {model.n_inputs} input columns, got {X.shape}")
    probs = _forward(list(model.weights), list(model.biases), X)[-1]
    return np.argmax(probs, axis=1), probs


def _stratified_folds(y: np.ndarray, folds: int, seed: int) -> list[np.ndarray]:
    """Per-class shuffled round-robin assignment to folds."""
    assignment = np.empty(y.shape[0], dtype=np.int64)
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = rng_for(seed, "cv-fold", int(cls)).permutation(idx)
        assignment[idx] = np.arange(idx.size) % folds
    return [np.flatnonzero(assignment == f) for f in range(folds)]


def _candidate_key(params: dict):
    return (sum(params["hidden_sizes"]), params["l2_alpha"], params["learning_rate"])


def grid_search(X: np.ndarray, y: np.ndarray, grid: dict, folds: int = 3,
                seed: int = 0, base: MlpConfig | None = None) -> tuple[dict, list[dict]]:
    """Stratified cross-validation over the Cartesian product of the grid.

    Scores by weighted F1; the best mean wins, ties toward the smaller
    network, then the smaller l2_alpha, then the smaller learning rate.
    Returns (best hyperparameters, CV table).
    """
    if folds < 2:
        raise ValueError("folds must be at least 2")
    y = np.asarray(y, dtype=np.int64)
    for cls, cnt in zip(*np.unique(y, return_counts=True)):
        if cnt < folds:
            raise ValueError(
                f"class {cls} has {cnt} members, fewer than {folds} folds; balance first"
            )
    base = base or MlpConfig()
    names = sorted(grid)
    candidates = [dict(zip(names, combo)) for combo in product(*(grid[n] for n in names))]
    fold_idx = _stratified_folds(y, folds, seed)
    table = []
    for ci, cand in enumerate(candidates):
        config = replace(base, **cand)
        scores = []
        for f in range(folds):
            test_ix = fold_idx[f]
            train_ix = np.concatenate([fold_idx[g] for g in range(folds) if g != f])
            model = mlp_train(X[train_ix], y[train_ix], config,
                              seed=rng_for(seed, "cv-train", ci, f).integers(2 ** 31))
            pred, _ = mlp_predict(model, X[test_ix])
            scores.append(evaluate_metrics(y[test_ix], pred).weighted_f1)
        table.append({**cand, "fold_scores": scores, "mean_score": float(np.mean(scores))})
    best_row = min(
        table,
        key=lambda row: (-row["mean_score"],) + _candidate_key({**MlpConfig().__dict__, **row}),
    )
    best = {k: best_row[k] for k in names}
    return best, table
