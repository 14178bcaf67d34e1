"""Numeric kernels with two interchangeable backends.

Every hot inner loop lives here twice: a pure-NumPy implementation
(``*_np``) and a numba ``@njit`` implementation (``*_nb``).  The module-level
alias (no suffix) points at the numba build when numba imports successfully
and the ``SEQREDUCE_NO_NUMBA`` environment variable is unset; setting
``SEQREDUCE_NO_NUMBA=1`` forces the NumPy path.  Both backends are
deterministic for fixed inputs; they may differ in the last floating-point
bits because summation order differs.  ``benchmarks/bench_kernels.py``
compares the two.

Matrix-matrix products are delegated to BLAS on both paths (numba's
``np.dot`` binds the same BLAS), so the numba variants win where scalar
loops dominate (per-edge SGD, binary searches, counting) and roughly tie
where GEMM dominates.
"""

import os

import numpy as np

_ENV_FLAG = "SEQREDUCE_NO_NUMBA"

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap


NUMBA_DISABLED = os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes")
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def _pick(np_impl, nb_impl):
    return nb_impl if USE_NUMBA else np_impl


# ---------------------------------------------------------------------------
# pairwise squared Euclidean distances


def pairwise_sq_dists_np(X):
    """Dense n x n matrix of squared Euclidean distances, zero diagonal."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    sq = np.einsum("ij,ij->i", X, X)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


@njit(cache=True)
def _pairwise_sq_dists_core(X):
    n = X.shape[0]
    g = np.dot(X, X.T)
    d2 = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        d2[i, i] = 0.0
        for j in range(i + 1, n):
            v = g[i, i] + g[j, j] - 2.0 * g[i, j]
            if v < 0.0:
                v = 0.0
            d2[i, j] = v
            d2[j, i] = v
    return d2


def pairwise_sq_dists_nb(X):
    return _pairwise_sq_dists_core(np.ascontiguousarray(X, dtype=np.float64))


pairwise_sq_dists = _pick(pairwise_sq_dists_np, pairwise_sq_dists_nb)


# ---------------------------------------------------------------------------
# t-SNE: conditional-probability calibration by binary search on precision

_CAL_TOL = 1e-5
_CAL_MAX_ITER = 64


def tsne_calibrate_np(d2, perplexity):
    """Per-row precisions so each conditional distribution hits `perplexity`.

    Binary search on beta_i = 1/(2 sigma_i^2); tolerance 1e-5 on the entropy
    (natural log of perplexity), at most 64 bisection steps per row.
    Returns the row-stochastic conditional matrix with zero diagonal.
    """
    n = d2.shape[0]
    target = np.log(perplexity)
    beta = np.ones(n)
    beta_min = np.full(n, -np.inf)
    beta_max = np.full(n, np.inf)
    eye = np.eye(n, dtype=bool)
    P = np.zeros((n, n))
    active = np.ones(n, dtype=bool)
    for _ in range(_CAL_MAX_ITER):
        if not active.any():
            break
        W = np.exp(-d2[active] * beta[active, None])
        W[eye[active]] = 0.0
        sumW = W.sum(axis=1)
        sumW[sumW == 0.0] = 1e-300
        Prow = W / sumW[:, None]
        # Shannon entropy H = log(sumW) + beta * <d2>
        avg_d2 = np.einsum("ij,ij->i", Prow, d2[active])
        H = np.log(sumW) + beta[active] * avg_d2
        P[active] = Prow
        diff = H - target
        done = np.abs(diff) <= _CAL_TOL
        idx = np.where(active)[0]
        hot = idx[~done]
        active[idx[done]] = False
        too_high = diff[~done] > 0.0
        up = hot[too_high]
        beta_min[up] = beta[up]
        beta[up] = np.where(np.isinf(beta_max[up]), beta[up] * 2.0, (beta[up] + beta_max[up]) / 2.0)
        down = hot[~too_high]
        beta_max[down] = beta[down]
        beta[down] = np.where(np.isinf(beta_min[down]), beta[down] / 2.0, (beta[down] + beta_min[down]) / 2.0)
    return P


@njit(cache=True)
def _tsne_calibrate_core(d2, perplexity):
    n = d2.shape[0]
    target = np.log(perplexity)
    P = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        beta = 1.0
        beta_min = -np.inf
        beta_max = np.inf
        for _ in range(_CAL_MAX_ITER):
            sumW = 0.0
            for j in range(n):
                if j != i:
                    P[i, j] = np.exp(-d2[i, j] * beta)
                    sumW += P[i, j]
            if sumW == 0.0:
                sumW = 1e-300
            sum_d2p = 0.0
            for j in range(n):
                P[i, j] /= sumW
                sum_d2p += d2[i, j] * P[i, j]
            H = np.log(sumW) + beta * sum_d2p
            diff = H - target
            if np.abs(diff) <= _CAL_TOL:
                break
            if diff > 0.0:
                beta_min = beta
                if beta_max == np.inf:
                    beta *= 2.0
                else:
                    beta = (beta + beta_max) / 2.0
            else:
                beta_max = beta
                if beta_min == -np.inf:
                    beta /= 2.0
                else:
                    beta = (beta + beta_min) / 2.0
        P[i, i] = 0.0
    return P


def tsne_calibrate_nb(d2, perplexity):
    return _tsne_calibrate_core(np.ascontiguousarray(d2, dtype=np.float64), float(perplexity))


tsne_calibrate = _pick(tsne_calibrate_np, tsne_calibrate_nb)


# ---------------------------------------------------------------------------
# t-SNE: KL divergence and gradient under the Student-t kernel (1 dof)

_EPS = 1e-12


def tsne_kl_grad_np(P, Y):
    """KL(P || Q) and its gradient for embedding Y; Q from Student-t, 1 dof."""
    d2 = pairwise_sq_dists_np(Y)
    W = 1.0 / (1.0 + d2)
    np.fill_diagonal(W, 0.0)
    sumW = W.sum()
    if sumW <= 0.0:
        sumW = _EPS
    Q = W / sumW
    mask = P > 0.0
    kl = float(np.sum(P[mask] * np.log(P[mask] / np.maximum(Q[mask], _EPS))))
    M = (P - Q) * W
    grad = 4.0 * (M.sum(axis=1)[:, None] * Y - M @ Y)
    return kl, grad


@njit(cache=True)
def _tsne_kl_grad_core(P, Y):
    n = Y.shape[0]
    g = np.dot(Y, Y.T)
    W = np.empty((n, n), dtype=np.float64)
    sumW = 0.0
    for i in range(n):
        W[i, i] = 0.0
        for j in range(i + 1, n):
            d2 = g[i, i] + g[j, j] - 2.0 * g[i, j]
            if d2 < 0.0:
                d2 = 0.0
            w = 1.0 / (1.0 + d2)
            W[i, j] = w
            W[j, i] = w
            sumW += 2.0 * w
    if sumW <= 0.0:
        sumW = _EPS
    kl = 0.0
    M = np.empty((n, n), dtype=np.float64)
    rowsum = np.zeros(n, dtype=np.float64)
    for i in range(n):
        for j in range(n):
            q = W[i, j] / sumW
            p = P[i, j]
            if p > 0.0:
                qq = q if q > _EPS else _EPS
                kl += p * np.log(p / qq)
            m = (p - q) * W[i, j]
            M[i, j] = m
            rowsum[i] += m
    MY = np.dot(M, Y)
    grad = np.empty_like(Y)
    for i in range(n):
        for d in range(Y.shape[1]):
            grad[i, d] = 4.0 * (rowsum[i] * Y[i, d] - MY[i, d])
    return kl, grad


def tsne_kl_grad_nb(P, Y):
    return _tsne_kl_grad_core(
        np.ascontiguousarray(P, dtype=np.float64),
        np.ascontiguousarray(Y, dtype=np.float64),
    )


tsne_kl_grad = _pick(tsne_kl_grad_np, tsne_kl_grad_nb)


# ---------------------------------------------------------------------------
# K-means: Lloyd iterations with empty-cluster repair

def _lloyd_np(X, centroids, max_iter, tol):
    n = X.shape[0]
    k = centroids.shape[0]
    centroids = centroids.copy()
    history = []
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = np.maximum(
            np.einsum("ij,ij->i", X, X)[:, None]
            + np.einsum("ij,ij->i", centroids, centroids)[None, :]
            - 2.0 * (X @ centroids.T),
            0.0,
        )
        assign = np.argmin(d2, axis=1)
        own = d2[np.arange(n), assign]
        # repair: hand the globally farthest point to each empty cluster;
        # re-sweep because a steal can empty a previously checked cluster
        while True:
            repaired = False
            for j in range(k):
                if not np.any(assign == j):
                    p = int(np.argmax(own))
                    assign[p] = j
                    own[p] = -1.0
                    repaired = True
            if not repaired:
                break
        counts = np.bincount(assign, minlength=k).astype(np.float64)
        new_centroids = np.zeros_like(centroids)
        np.add.at(new_centroids, assign, X)
        new_centroids /= counts[:, None]
        centroids = new_centroids
        diff = X - centroids[assign]
        inertia = float(np.einsum("ij,ij->", diff, diff))
        history.append(inertia)
        if len(history) >= 2:
            prev = history[-2]
            if prev <= 0.0 or (prev - inertia) / prev < tol:
                break
    return assign, centroids, np.array(history)


@njit(cache=True)
def _lloyd_core(X, centroids, max_iter, tol):
    n, m = X.shape
    k = centroids.shape[0]
    cent = centroids.copy()
    history = np.empty(max_iter, dtype=np.float64)
    assign = np.zeros(n, dtype=np.int64)
    own = np.zeros(n, dtype=np.float64)
    n_done = 0
    for it in range(max_iter):
        for i in range(n):
            best = np.inf
            bj = 0
            for j in range(k):
                d = 0.0
                for c in range(m):
                    t = X[i, c] - cent[j, c]
                    d += t * t
                if d < best:
                    best = d
                    bj = j
            assign[i] = bj
            own[i] = best
        counts = np.zeros(k, dtype=np.int64)
        for i in range(n):
            counts[assign[i]] += 1
        while True:
            repaired = False
            for j in range(k):
                if counts[j] == 0:
                    p = 0
                    worst = -1.0
                    for i in range(n):
                        if own[i] > worst:
                            worst = own[i]
                            p = i
                    counts[assign[p]] -= 1
                    assign[p] = j
                    counts[j] = 1
                    own[p] = -1.0
                    repaired = True
            if not repaired:
                break
        new_cent = np.zeros((k, m), dtype=np.float64)
        for i in range(n):
            j = assign[i]
            for c in range(m):
                new_cent[j, c] += X[i, c]
        for j in range(k):
            for c in range(m):
                new_cent[j, c] /= counts[j]
        cent = new_cent
        inertia = 0.0
        for i in range(n):
            j = assign[i]
            for c in range(m):
                t = X[i, c] - cent[j, c]
                inertia += t * t
        history[it] = inertia
        n_done = it + 1
        if it >= 1:
            prev = history[it - 1]
            if prev <= 0.0 or (prev - inertia) / prev < tol:
                break
    return assign, cent, history[:n_done]


def _lloyd_nb(X, centroids, max_iter, tol):
    return _lloyd_core(
        np.ascontiguousarray(X, dtype=np.float64),
        np.ascontiguousarray(centroids, dtype=np.float64),
        int(max_iter),
        float(tol),
    )


lloyd = _pick(_lloyd_np, _lloyd_nb)


# ---------------------------------------------------------------------------
# UMAP: smooth-knn bandwidth calibration

_SIGMA_TOL = 1e-3
_SIGMA_MAX_ITER = 64
_SIGMA_MIN = 1e-12


def smooth_knn_np(knn_dists, target):
    """Per-point (sigma, rho): rho is the nearest-neighbor distance and sigma
    solves  sum_j exp(-max(0, d_ij - rho_i)/sigma_i) = target  by bisection
    (tolerance 1e-3, at most 64 steps)."""
    n = knn_dists.shape[0]
    rho = knn_dists[:, 0].copy()
    shifted = np.maximum(knn_dists - rho[:, None], 0.0)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    mid = np.ones(n)
    for _ in range(_SIGMA_MAX_ITER):
        psum = np.exp(-shifted / mid[:, None]).sum(axis=1)
        err = psum - target
        done = np.abs(err) < _SIGMA_TOL
        if done.all():
            break
        high = (err > 0.0) & ~done
        hi[high] = mid[high]
        mid[high] = (lo[high] + hi[high]) / 2.0
        low = (err <= 0.0) & ~done
        lo[low] = mid[low]
        mid[low] = np.where(np.isinf(hi[low]), mid[low] * 2.0, (lo[low] + hi[low]) / 2.0)
    return np.maximum(mid, _SIGMA_MIN), rho


@njit(cache=True)
def _smooth_knn_core(knn_dists, target):
    n, kNN = knn_dists.shape
    sigma = np.empty(n, dtype=np.float64)
    rho = np.empty(n, dtype=np.float64)
    for i in range(n):
        rho[i] = knn_dists[i, 0]
        lo = 0.0
        hi = np.inf
        mid = 1.0
        for _ in range(_SIGMA_MAX_ITER):
            psum = 0.0
            for j in range(kNN):
                d = knn_dists[i, j] - rho[i]
                if d > 0.0:
                    psum += np.exp(-d / mid)
                else:
                    psum += 1.0
            err = psum - target
            if np.abs(err) < _SIGMA_TOL:
                break
            if err > 0.0:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                if hi == np.inf:
                    mid *= 2.0
                else:
                    mid = (lo + hi) / 2.0
        sigma[i] = mid if mid > _SIGMA_MIN else _SIGMA_MIN
    return sigma, rho


def smooth_knn_nb(knn_dists, target):
    return _smooth_knn_core(np.ascontiguousarray(knn_dists, dtype=np.float64), float(target))


smooth_knn = _pick(smooth_knn_np, smooth_knn_nb)


# ---------------------------------------------------------------------------
# UMAP: per-edge SGD on the fuzzy cross-entropy
#
# Edges are revisited on the canonical epochs-per-sample schedule (an edge of
# weight w is touched every max_w/w epochs); every visit applies one clipped
# attractive update and `negative_sample_rate` clipped repulsive updates
# against uniform negative targets.  Negative targets are pre-drawn into
# `neg_indices`, consumed in edge order within each epoch, so both backends
# use exactly the same draws.  The numba path updates asynchronously
# (canonical); the NumPy path applies each epoch's updates synchronously from
# the epoch-start coordinates, so the two backends agree in distribution but
# not bitwise.

_GRAD_CLIP = 4.0
_REP_EPS = 0.001


def count_negative_draws(epochs_per_sample, negative_sample_rate, n_epochs):
    """Total negative draws the schedule will consume (both backends)."""
    eps_s = np.asarray(epochs_per_sample, dtype=np.float64)
    eps_n = eps_s / float(negative_sample_rate)
    next_s = eps_s.copy()
    next_n = eps_n.copy()
    total = 0
    for epoch in range(n_epochs):
        active = next_s <= epoch
        if active.any():
            kneg = ((epoch - next_n[active]) / eps_n[active]).astype(np.int64)
            total += int(kneg.sum())
            next_n[active] += kneg * eps_n[active]
            next_s[active] += eps_s[active]
    return total


def umap_optimize_np(Y, head, tail, epochs_per_sample, a, b, gamma,
                     negative_sample_rate, n_epochs, neg_indices, initial_alpha=1.0):
    Y = Y.copy()
    n = Y.shape[0]
    eps_s = np.asarray(epochs_per_sample, dtype=np.float64)
    eps_n = eps_s / float(negative_sample_rate)
    next_s = eps_s.copy()
    next_n = eps_n.copy()
    ptr = 0
    for epoch in range(n_epochs):
        alpha = initial_alpha * (1.0 - epoch / float(n_epochs))
        active = np.where(next_s <= epoch)[0]
        if active.size == 0:
            continue
        h = head[active]
        t = tail[active]
        delta = Y[h] - Y[t]
        d2 = np.einsum("ij,ij->i", delta, delta)
        coeff = np.zeros_like(d2)
        pos = d2 > 0.0
        coeff[pos] = (-2.0 * a * b * d2[pos] ** (b - 1.0)) / (a * d2[pos] ** b + 1.0)
        g = np.clip(coeff[:, None] * delta, -_GRAD_CLIP, _GRAD_CLIP)
        np.add.at(Y, h, alpha * g)
        np.add.at(Y, t, -alpha * g)
        next_s[active] += eps_s[active]
        kneg = ((epoch - next_n[active]) / eps_n[active]).astype(np.int64)
        total = int(kneg.sum())
        if total > 0:
            h_rep = np.repeat(h, kneg)
            negs = neg_indices[ptr:ptr + total].astype(np.int64)
            ptr += total
            delta = Y[h_rep] - Y[negs]
            d2 = np.einsum("ij,ij->i", delta, delta)
            coeff = np.zeros_like(d2)
            pos = d2 > 0.0
            coeff[pos] = (2.0 * gamma * b) / ((_REP_EPS + d2[pos]) * (a * d2[pos] ** b + 1.0))
            g = np.where(
                (d2 == 0.0)[:, None] & (h_rep != negs)[:, None],
                _GRAD_CLIP,
                np.clip(coeff[:, None] * delta, -_GRAD_CLIP, _GRAD_CLIP),
            )
            g[h_rep == negs] = 0.0
            np.add.at(Y, h_rep, alpha * g)
        next_n[active] += kneg * eps_n[active]
    return Y


@njit(cache=True)
def _umap_optimize_core(Y, head, tail, eps_s, a, b, gamma,
                        negative_sample_rate, n_epochs, neg_indices, initial_alpha):
    n, dim = Y.shape
    n_edges = eps_s.shape[0]
    eps_n = eps_s / negative_sample_rate
    next_s = eps_s.copy()
    next_n = eps_n.copy()
    ptr = 0
    for epoch in range(n_epochs):
        alpha = initial_alpha * (1.0 - epoch / n_epochs)
        for e in range(n_edges):
            if next_s[e] > epoch:
                continue
            i = head[e]
            j = tail[e]
            d2 = 0.0
            for d in range(dim):
                t = Y[i, d] - Y[j, d]
                d2 += t * t
            if d2 > 0.0:
                coeff = (-2.0 * a * b * d2 ** (b - 1.0)) / (a * d2 ** b + 1.0)
            else:
                coeff = 0.0
            for d in range(dim):
                g = coeff * (Y[i, d] - Y[j, d])
                if g > _GRAD_CLIP:
                    g = _GRAD_CLIP
                elif g < -_GRAD_CLIP:
                    g = -_GRAD_CLIP
                Y[i, d] += alpha * g
                Y[j, d] -= alpha * g
            next_s[e] += eps_s[e]
            kneg = int((epoch - next_n[e]) / eps_n[e])
            for _ in range(kneg):
                other = int(neg_indices[ptr])
                ptr += 1
                if other == i:
                    continue
                d2 = 0.0
                for d in range(dim):
                    t = Y[i, d] - Y[other, d]
                    d2 += t * t
                if d2 > 0.0:
                    coeff = (2.0 * gamma * b) / ((_REP_EPS + d2) * (a * d2 ** b + 1.0))
                else:
                    coeff = 0.0
                for d in range(dim):
                    if d2 > 0.0:
                        g = coeff * (Y[i, d] - Y[other, d])
                        if g > _GRAD_CLIP:
                            g = _GRAD_CLIP
                        elif g < -_GRAD_CLIP:
                            g = -_GRAD_CLIP
                    else:
                        g = _GRAD_CLIP
                    Y[i, d] += alpha * g
            next_n[e] += kneg * eps_n[e]
    return Y


def umap_optimize_nb(Y, head, tail, epochs_per_sample, a, b, gamma,
                     negative_sample_rate, n_epochs, neg_indices, initial_alpha=1.0):
    return _umap_optimize_core(
        np.ascontiguousarray(Y, dtype=np.float64),
        np.ascontiguousarray(head, dtype=np.int64),
        np.ascontiguousarray(tail, dtype=np.int64),
        np.ascontiguousarray(epochs_per_sample, dtype=np.float64),
        float(a), float(b), float(gamma),
        float(negative_sample_rate), int(n_epochs),
        np.ascontiguousarray(neg_indices, dtype=np.int32),
        float(initial_alpha),
    )


umap_optimize = _pick(umap_optimize_np, umap_optimize_nb)


# ---------------------------------------------------------------------------
# k-mer counting

def kmer_counts_np(codes, offsets, k):
    """Raw overlapping k-mer counts per read.

    `codes` holds all reads' base codes (A=0,C=1,G=2,T=3) concatenated,
    `offsets` the n+1 read boundaries.  Column j is the j-th k-mer in
    lexicographic order, i.e. the base-4 value of its code string.
    """
    n = offsets.shape[0] - 1
    m = 4 ** k
    powers = 4 ** np.arange(k - 1, -1, -1, dtype=np.int64)
    out = np.zeros((n, m), dtype=np.float64)
    for r in range(n):
        seg = codes[offsets[r]:offsets[r + 1]]
        if seg.shape[0] < k:
            continue
        windows = np.lib.stride_tricks.sliding_window_view(seg.astype(np.int64), k)
        idx = windows @ powers
        out[r] = np.bincount(idx, minlength=m)
    return out


@njit(cache=True)
def _kmer_counts_core(codes, offsets, k, m):
    n = offsets.shape[0] - 1
    out = np.zeros((n, m), dtype=np.float64)
    mask = m - 1  # m = 4**k, power of two in base-4 rolling arithmetic
    for r in range(n):
        lo = offsets[r]
        hi = offsets[r + 1]
        if hi - lo < k:
            continue
        idx = 0
        for p in range(lo, lo + k):
            idx = idx * 4 + codes[p]
        out[r, idx] += 1.0
        for p in range(lo + k, hi):
            idx = ((idx * 4) & mask) + codes[p]
            out[r, idx] += 1.0
    return out


def kmer_counts_nb(codes, offsets, k):
    return _kmer_counts_core(
        np.ascontiguousarray(codes, dtype=np.int8),
        np.ascontiguousarray(offsets, dtype=np.int64),
        int(k),
        4 ** int(k),
    )


kmer_counts = _pick(kmer_counts_np, kmer_counts_nb)
