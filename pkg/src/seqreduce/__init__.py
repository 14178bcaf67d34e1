"""Adaptive dimensionality-reduction selection for k-mer based DNA read clustering.

Pipeline: parse or synthesize noisy-read datasets, featurize reads as k-mer
frequency matrices, reduce with PCA / exact t-SNE / UMAP, score each method by
K-means clustering accuracy against the ground-truth read groups, and train an
MLP meta-classifier that picks the best reduction method for a given dataset
and target dimension.
"""

__version__ = "0.1.0"

from seqreduce.dataset import (
    DnaRead,
    FormatError,
    GroundTruthDataset,
    NoiseModel,
    ReferenceSet,
    generate_synthetic,
    parse_centers,
    parse_clusters,
    restrict_clusters,
    sample_subsets,
    slice_range,
    write_centers,
    write_clusters,
)
from seqreduce.features import KmerMatrix, ScalerStats, build_kmer_matrix, kmer_profile
from seqreduce.reduce import Embedding, PcaModel, ReductionSpec, reduce_embed
from seqreduce.cluster import KmeansParams, KmeansResult, clustering_accuracy, kmeans
from seqreduce.config import RunConfig, SyntheticConfig, load_config, save_config
from seqreduce.selector import SelectorModel, boost_train, load_selector, save_selector, sub_tag

__all__ = [
    "DnaRead",
    "Embedding",
    "FormatError",
    "GroundTruthDataset",
    "KmeansParams",
    "KmeansResult",
    "KmerMatrix",
    "NoiseModel",
    "PcaModel",
    "ReductionSpec",
    "ReferenceSet",
    "RunConfig",
    "ScalerStats",
    "SelectorModel",
    "SyntheticConfig",
    "boost_train",
    "build_kmer_matrix",
    "clustering_accuracy",
    "generate_synthetic",
    "kmeans",
    "kmer_profile",
    "load_config",
    "load_selector",
    "parse_centers",
    "parse_clusters",
    "reduce_embed",
    "restrict_clusters",
    "sample_subsets",
    "save_config",
    "save_selector",
    "slice_range",
    "sub_tag",
    "write_centers",
    "write_clusters",
]
