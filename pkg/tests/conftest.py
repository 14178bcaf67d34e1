import numpy as np
import pytest

from seqreduce.dataset import DnaRead, GroundTruthDataset, NoiseModel, generate_synthetic


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def make_dataset(n_clusters=6, reads_per_cluster=8, center_len=60,
                 noise=(0.05, 0.02, 0.02), seed=0) -> GroundTruthDataset:
    """Small synthetic ground-truth dataset for pipeline-level tests."""
    sub, ins, dele = noise
    model = NoiseModel(substitution_rate=sub, insertion_rate=ins,
                       deletion_rate=dele, seed=seed)
    _, ds = generate_synthetic(n_clusters, reads_per_cluster, center_len, model)
    return ds


def dataset_from_strings(groups: list[list[str]]) -> GroundTruthDataset:
    """Dataset built directly from per-cluster sequence lists."""
    reads = tuple(
        DnaRead(bases=seq, cluster_id=cid)
        for cid, seqs in enumerate(groups)
        for seq in seqs
    )
    return GroundTruthDataset(reads=reads, cluster_count=len(groups))


@pytest.fixture
def tiny_dataset() -> GroundTruthDataset:
    return make_dataset()


def gaussian_blobs(rng, centers, n_per, scale=0.1):
    """Labeled Gaussian point clouds around the given center rows."""
    centers = np.asarray(centers, dtype=float)
    X = np.concatenate(
        [c + scale * rng.standard_normal((n_per, centers.shape[1])) for c in centers]
    )
    y = np.repeat(np.arange(len(centers)), n_per)
    return X, y
