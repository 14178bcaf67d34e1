"""Dataset sub-tagging: label each (subset, target_dim) pair with the
reduction method that maximizes downstream clustering accuracy, and build
the meta-feature vectors the selector trains on."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from seqreduce.cluster import KmeansParams, clustering_accuracy, kmeans
from seqreduce.dataset import GroundTruthDataset
from seqreduce.features import build_kmer_matrix
from seqreduce.reduce import ReductionSpec, TsneParams, UmapParams, reduce_embed
from seqreduce.seeding import derive_seed

LABEL_ORDER = ("PCA", "TSNE", "UMAP")
# preference when accuracies tie: cheapest, most deterministic method first
TIE_ORDER = ("PCA", "UMAP", "TSNE")


@dataclass(frozen=True)
class TaggedInstance:
    """One meta-training example: meta-features of a (subset, dim) pair and
    the name of the winning reduction method."""

    features: np.ndarray
    label: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.label not in LABEL_ORDER:
            raise ValueError(f"label {self.label!r} not in {LABEL_ORDER}")
        self.features.flags.writeable = False

    @property
    def label_index(self) -> int:
        return LABEL_ORDER.index(self.label)


def meta_features(subset: GroundTruthDataset, target_dim: int, k: int) -> np.ndarray:
    """Concatenation, in fixed order: 4^k k-mer column means, read count,
    cluster count, mean read length, target_dim, log2(target_dim)."""
    if len(subset.reads) == 0:
        raise ValueError("subset has no reads")
    matrix = build_kmer_matrix(subset, k)
    col_means = matrix.values.mean(axis=0)
    mean_len = float(np.mean([len(r.bases) for r in subset.reads]))
    tail = np.array(
        [len(subset.reads), subset.cluster_count, mean_len, target_dim, np.log2(target_dim)],
        dtype=np.float64,
    )
    return np.concatenate([col_means, tail])


def scalar_feature_names() -> list[str]:
    """Names of the trailing non-column-mean meta-features, in order."""
    return ["n_reads", "cluster_count", "mean_read_length", "target_dim", "log2_target_dim"]


def pick_label(accuracies: dict[str, float]) -> str:
    """Highest accuracy wins; exact ties resolve in TIE_ORDER."""
    best = None
    for method in TIE_ORDER:
        acc = accuracies[method]
        if best is None or acc > best[1]:
            best = (method, acc)
    return best[0]


def method_accuracies(
    values: np.ndarray,
    labels: np.ndarray,
    cluster_count: int,
    dim: int,
    seed: int,
    *,
    stage: str,
    subset_id: int = 0,
    tsne: TsneParams | None = None,
    umap: UmapParams | None = None,
    kmeans_n_init: int = 10,
    kmeans_max_iter: int = 300,
) -> dict[str, float]:
    """Clustering accuracy of each reduction method on one feature matrix
    at one target dim.  Every (method, dim) cell derives its own seed from
    (seed, stage, subset_id, dim, method), so results do not depend on
    evaluation order."""
    accuracies = {}
    for method in LABEL_ORDER:
        spec = ReductionSpec(
            method, dim,
            seed=derive_seed(seed, stage, subset_id, dim, method),
            tsne=tsne or TsneParams(), umap=umap or UmapParams(),
        )
        emb = reduce_embed(values, spec)
        result = kmeans(
            emb.coords,
            KmeansParams(
                k=cluster_count,
                n_init=kmeans_n_init,
                max_iter=kmeans_max_iter,
                seed=derive_seed(seed, stage + "-kmeans", subset_id, dim, method),
            ),
        )
        accuracies[method] = clustering_accuracy(result.assignments, labels, cluster_count)
    return accuracies


def sub_tag(
    subset: GroundTruthDataset,
    dims: list[int],
    k: int,
    seed: int,
    *,
    subset_id: int = 0,
    tsne: TsneParams | None = None,
    umap: UmapParams | None = None,
    kmeans_n_init: int = 10,
    kmeans_max_iter: int = 300,
) -> list[TaggedInstance]:
    """For each target dim: embed with all three methods, cluster with
    K-means at the true cluster count, score clustering accuracy, and tag
    the dim with the winning method."""
    if subset.cluster_count < 2:
        raise ValueError("sub-tagging needs at least 2 clusters")
    matrix = build_kmer_matrix(subset, k)
    n, m = matrix.values.shape
    dim_cap = min(n - 1, m)
    for dim in dims:
        if not 1 <= dim <= dim_cap:
            raise ValueError(f"target_dim {dim} invalid for a {n}x{m} matrix (max {dim_cap})")
    out = []
    for dim in dims:
        accuracies = method_accuracies(
            matrix.values, matrix.row_labels, subset.cluster_count, dim, seed,
            stage="subtag", subset_id=subset_id, tsne=tsne, umap=umap,
            kmeans_n_init=kmeans_n_init, kmeans_max_iter=kmeans_max_iter,
        )
        out.append(
            TaggedInstance(
                features=meta_features(subset, dim, k),
                label=pick_label(accuracies),
                provenance={
                    "subset_id": subset_id,
                    "target_dim": dim,
                    "accuracies": dict(accuracies),
                },
            )
        )
    return out
