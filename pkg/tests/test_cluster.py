"""K-means and clustering accuracy against brute-force oracles."""

from itertools import product

import numpy as np
import pytest

from seqreduce.cluster import (
    NO_LABEL,
    KmeansParams,
    clustering_accuracy,
    kmeans,
    majority_predictor,
)

from conftest import gaussian_blobs


def oracle_accuracy(assignments, labels, k) -> float:
    """Frequency-table oracle: build the cluster-by-label count table, let
    each cluster vote for its argmax row entry, count matching points."""
    assignments = np.asarray(assignments)
    labels = np.asarray(labels)
    n_labels = labels.max() + 1
    table = np.zeros((k, n_labels), dtype=int)
    for a, l in zip(assignments, labels):
        table[a, l] += 1
    votes = table.argmax(axis=1)  # argmax takes the smallest on ties
    correct = sum(1 for a, l in zip(assignments, labels) if votes[a] == l)
    return correct / len(labels)


def oracle_best_inertia(X, k) -> float:
    """Exhaustive minimum inertia over every assignment of points to k
    non-empty groups."""
    n = X.shape[0]
    best = np.inf
    for assign in product(range(k), repeat=n):
        if len(set(assign)) < k:
            continue
        assign = np.array(assign)
        total = 0.0
        for j in range(k):
            pts = X[assign == j]
            total += ((pts - pts.mean(axis=0)) ** 2).sum()
        best = min(best, total)
    return best


# ---------------------------------------------------------------------------
# accuracy metric


def test_accuracy_exhaustive_against_oracle():
    # all assignments x all labelings for small n: exact agreement
    rng = np.random.default_rng(0)
    for n, k, n_labels in [(5, 2, 2), (6, 3, 2), (8, 2, 3)]:
        for _ in range(40):
            assignments = rng.integers(0, k, size=n)
            labels = rng.integers(0, n_labels, size=n)
            got = clustering_accuracy(assignments, labels, k)
            assert got == oracle_accuracy(assignments, labels, k)


def test_accuracy_all_assignments_tiny():
    # fully exhaustive over assignment space, n=4, k=2, one labeling
    labels = np.array([0, 0, 1, 1])
    for assign in product(range(2), repeat=4):
        a = np.array(assign)
        assert clustering_accuracy(a, labels, 2) == oracle_accuracy(a, labels, 2)


def test_accuracy_perfect_and_worst():
    labels = np.array([0, 0, 1, 1, 2, 2])
    assert clustering_accuracy(labels, labels, 3) == 1.0
    # one cluster swallowing everything predicts the tie-smallest label
    lumped = np.zeros(6, dtype=int)
    assert clustering_accuracy(lumped, labels, 1) == pytest.approx(2 / 6)


def test_majority_predictor_hand_table():
    assignments = np.array([0, 0, 0, 1, 1, 2, 2, 2])
    labels = np.array([1, 1, 0, 2, 2, 0, 0, 1])
    pred = majority_predictor(assignments, labels, 4)
    np.testing.assert_array_equal(pred, [1, 2, 0, NO_LABEL])


def test_majority_predictor_tie_goes_to_smaller_label():
    pred = majority_predictor(np.array([0, 0]), np.array([2, 1]), 1)
    assert pred[0] == 1


def test_majority_predictor_validation():
    with pytest.raises(ValueError):
        majority_predictor(np.array([0, 1]), np.array([0]), 2)
    with pytest.raises(ValueError):
        majority_predictor(np.array([0]), np.array([-1]), 1)


def test_with_predictor():
    X, y = gaussian_blobs(np.random.default_rng(1), [[0, 0], [10, 10]], 8)
    res = kmeans(X, KmeansParams(k=2, n_init=3, seed=5)).with_predictor(y)
    assert res.predictor is not None
    assert sorted(res.predictor) == [0, 1]


# ---------------------------------------------------------------------------
# k-means


def test_inertia_history_monotone_on_seeded_runs(rng):
    for seed in range(100):
        X = rng.standard_normal((30, 3))
        res = kmeans(X, KmeansParams(k=4, n_init=1, seed=seed))
        assert np.all(np.diff(res.inertia_history) <= 1e-9)


def test_matches_exhaustive_optimum_small():
    # 20 instances, n <= 8, k = 2: enough restarts find the global optimum
    rng = np.random.default_rng(7)
    for trial in range(20):
        n = int(rng.integers(4, 9))
        X = rng.standard_normal((n, 2)) * 2.0
        res = kmeans(X, KmeansParams(k=2, n_init=10, seed=trial))
        assert res.inertia == pytest.approx(oracle_best_inertia(X, 2), rel=1e-7)


def test_recovers_separated_blobs(rng):
    X, y = gaussian_blobs(rng, np.eye(3) * 20.0, 20, scale=0.5)
    res = kmeans(X, KmeansParams(k=3, n_init=5, seed=0))
    assert clustering_accuracy(res.assignments, y, 3) == 1.0
    assert res.inertia == pytest.approx(res.inertia_history[-1])


def test_deterministic_given_seed(rng):
    X = rng.standard_normal((40, 4))
    a = kmeans(X, KmeansParams(k=5, n_init=4, seed=11))
    b = kmeans(X, KmeansParams(k=5, n_init=4, seed=11))
    np.testing.assert_array_equal(a.assignments, b.assignments)
    np.testing.assert_array_equal(a.centroids, b.centroids)


def test_k_equals_n_gives_zero_inertia(rng):
    X = rng.standard_normal((6, 2))
    res = kmeans(X, KmeansParams(k=6, n_init=5, seed=3))
    assert res.inertia == pytest.approx(0.0, abs=1e-12)
    assert len(set(res.assignments.tolist())) == 6


def test_duplicate_points_empty_cluster_repair():
    # more centroids than distinct locations forces empty-cluster repair
    X = np.array([[0.0, 0.0]] * 4 + [[5.0, 5.0]] * 4 + [[0.1, 0.0], [5.1, 5.0]])
    res = kmeans(X, KmeansParams(k=4, n_init=6, seed=2))
    assert res.centroids.shape == (4, 2)
    assert np.isfinite(res.inertia)
    counts = np.bincount(res.assignments, minlength=4)
    assert np.all(counts > 0)  # no cluster left empty after repair


def test_parameter_validation(rng):
    X = rng.standard_normal((5, 2))
    with pytest.raises(ValueError):
        kmeans(X, KmeansParams(k=6))
    with pytest.raises(ValueError):
        KmeansParams(k=0)
    with pytest.raises(ValueError):
        KmeansParams(k=2, n_init=0)
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        kmeans(bad, KmeansParams(k=2))
