"""k-mer frequency featurization and per-column standardization."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from seqreduce import kernels
from seqreduce.dataset import BASES, DnaRead, GroundTruthDataset, encode_bases


@dataclass(frozen=True)
class KmerMatrix:
    """n reads by 4^k k-mer frequencies; rows sum to 1 for reads of length
    at least k and are all-zero otherwise.  Column j is the j-th k-mer in
    lexicographic A<C<G<T order."""

    values: np.ndarray
    k: int
    row_labels: np.ndarray

    def __post_init__(self):
        self.values.flags.writeable = False
        self.row_labels.flags.writeable = False

    @property
    def n_reads(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ScalerStats:
    """Per-column mean and standard deviation (population, ddof 0).
    Constant columns store std 1 so scaling leaves them at 0."""

    mean: np.ndarray
    std: np.ndarray


def kmer_strings(k: int) -> list[str]:
    """All 4^k k-mers in lexicographic order."""
    return ["".join(p) for p in product(BASES, repeat=k)]


def kmer_profile(read: DnaRead, k: int) -> np.ndarray:
    """Overlapping k-mer frequencies of one read.

    Entry for k-mer w is (occurrences of w) / (len - k + 1); all zeros when
    the read is shorter than k.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    codes = encode_bases(read.bases)
    offsets = np.array([0, codes.shape[0]], dtype=np.int64)
    counts = kernels.kmer_counts(codes, offsets, k)[0]
    denom = len(read.bases) - k + 1
    if denom < 1:
        return counts  # all zeros
    return counts / denom


def build_kmer_matrix(ds: GroundTruthDataset, k: int) -> KmerMatrix:
    """Stack per-read profiles; row order equals dataset read order."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if len(ds.reads) == 0:
        raise ValueError("dataset has no reads")
    lengths = np.array([len(r.bases) for r in ds.reads], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(lengths)])
    codes = np.empty(int(offsets[-1]), dtype=np.int8)
    for r, read in enumerate(ds.reads):
        codes[offsets[r]:offsets[r + 1]] = encode_bases(read.bases)
    counts = kernels.kmer_counts(codes, offsets, k)
    denom = np.maximum(lengths - k + 1, 1).astype(np.float64)
    values = counts / denom[:, None]
    return KmerMatrix(values, k, ds.labels)


def fit_scaler(matrix: np.ndarray) -> ScalerStats:
    X = np.asarray(matrix, dtype=np.float64)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return ScalerStats(mean, std)


def apply_scaler(stats: ScalerStats, matrix: np.ndarray) -> np.ndarray:
    X = np.asarray(matrix, dtype=np.float64)
    if X.shape[1] != stats.mean.shape[0]:
        raise ValueError(
            f"matrix has {X.shape[1]} columns, scaler was fitted on {stats.mean.shape[0]}"
        )
    return (X - stats.mean) / stats.std


def write_matrix_csv(matrix: KmerMatrix, path) -> None:
    """Headered debug CSV: first column cluster_id, then one column per
    k-mer in the fixed lexicographic order.  Floats use repr for exact
    round-trips."""
    header = ["cluster_id"] + kmer_strings(matrix.k)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for label, row in zip(matrix.row_labels, matrix.values):
            fh.write(",".join([str(int(label))] + [repr(float(v)) for v in row]) + "\n")
