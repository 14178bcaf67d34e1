"""Compare the numpy and numba implementations of every hot kernel.

Run:  python3 benchmarks/bench_kernels.py [--repeats N]

Each kernel family ships as a pure-numpy function plus a numba-compiled
twin; the library picks one at import time (see SEQREDUCE_NO_NUMBA).  This
script bypasses the switch and times both directly on identical inputs,
reporting best-of-N wall time and the speedup ratio.  Numba functions are
called once before timing so JIT compilation is excluded.
"""

import argparse
import time

import numpy as np

from seqreduce import kernels


def bench_pair(label, np_fn, nb_fn, args, repeats):
    def best_of(fn):
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn(*args)
            times.append(time.perf_counter() - t0)
        return min(times)

    t_np = best_of(np_fn)
    if nb_fn is None:
        print(f"{label:<22} {t_np * 1e3:>10.2f} {'-':>10} {'-':>8}")
        return
    nb_fn(*args)  # warm the JIT cache outside the timed region
    t_nb = best_of(nb_fn)
    print(f"{label:<22} {t_np * 1e3:>10.2f} {t_nb * 1e3:>10.2f} {t_np / t_nb:>7.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per implementation (best is kept)")
    opts = parser.parse_args()

    rng = np.random.default_rng(0)
    have_nb = kernels.HAVE_NUMBA
    fetch = (lambda name: getattr(kernels, name)) if have_nb else (lambda name: None)

    print(f"numba available: {have_nb}")
    print(f"{'kernel':<22} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")

    X = rng.standard_normal((600, 64))
    bench_pair("pairwise_sq_dists", kernels.pairwise_sq_dists_np,
               fetch("pairwise_sq_dists_nb"), (X,), opts.repeats)

    d2 = kernels.pairwise_sq_dists_np(X)
    bench_pair("tsne_calibrate", kernels.tsne_calibrate_np,
               fetch("tsne_calibrate_nb"), (d2, 30.0), opts.repeats)

    P = rng.random((600, 600))
    P = P + P.T
    np.fill_diagonal(P, 0.0)
    P /= P.sum()
    Y = rng.standard_normal((600, 2))
    bench_pair("tsne_kl_grad", kernels.tsne_kl_grad_np,
               fetch("tsne_kl_grad_nb"), (P, Y), opts.repeats)

    Xk = rng.standard_normal((2000, 16))
    init = np.ascontiguousarray(Xk[rng.choice(2000, 12, replace=False)])
    bench_pair("lloyd", kernels._lloyd_np, fetch("_lloyd_nb"),
               (Xk, init, 100, 1e-4), opts.repeats)

    knn = np.cumsum(0.1 + rng.random((2000, 15)), axis=1)
    bench_pair("smooth_knn", kernels.smooth_knn_np, fetch("smooth_knn_nb"),
               (knn, float(np.log2(15.0))), opts.repeats)

    n_points, n_edges, n_epochs = 1000, 8000, 100
    head = rng.integers(0, n_points, n_edges, dtype=np.int64)
    tail = rng.integers(0, n_points, n_edges, dtype=np.int64)
    eps_s = 1.0 / rng.uniform(0.05, 1.0, n_edges)
    Yu = np.ascontiguousarray(rng.uniform(-10, 10, (n_points, 2)))
    n_draws = kernels.count_negative_draws(eps_s, 5, n_epochs)
    neg = rng.integers(0, n_points, n_draws, dtype=np.int32)
    bench_pair("umap_optimize", kernels.umap_optimize_np,
               fetch("umap_optimize_nb"),
               (Yu, head, tail, eps_s, 1.577, 0.895, 1.0, 5, n_epochs, neg),
               opts.repeats)

    lengths = rng.integers(80, 160, 2000)
    offsets = np.concatenate([[0], np.cumsum(lengths)])
    codes = rng.integers(0, 4, int(offsets[-1])).astype(np.int8)
    bench_pair("kmer_counts (k=5)", kernels.kmer_counts_np,
               fetch("kmer_counts_nb"), (codes, offsets, 5), opts.repeats)


if __name__ == "__main__":
    main()
