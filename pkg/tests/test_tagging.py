"""Dataset sub-tagging: meta-features, label picking, per-cell accuracies."""

import numpy as np
import pytest

from seqreduce.features import build_kmer_matrix
from seqreduce.reduce import TsneParams, UmapParams
from seqreduce.selector import (
    LABEL_ORDER,
    TIE_ORDER,
    TaggedInstance,
    meta_features,
    method_accuracies,
    pick_label,
    sub_tag,
)
from seqreduce.selector.tagging import scalar_feature_names

from conftest import make_dataset


def test_label_orders():
    assert LABEL_ORDER == ("PCA", "TSNE", "UMAP")
    assert TIE_ORDER == ("PCA", "UMAP", "TSNE")


def test_tagged_instance_validation(rng):
    with pytest.raises(ValueError):
        TaggedInstance(features=rng.standard_normal(3), label="LDA")
    inst = TaggedInstance(features=rng.standard_normal(3), label="UMAP")
    assert inst.label_index == 2
    with pytest.raises(ValueError):
        inst.features[0] = 5.0  # read-only


def test_pick_label_highest_wins():
    assert pick_label({"PCA": 0.3, "TSNE": 0.9, "UMAP": 0.5}) == "TSNE"
    assert pick_label({"PCA": 0.99, "TSNE": 0.2, "UMAP": 0.5}) == "PCA"


def test_pick_label_tie_order():
    # exact triple tie: PCA, then UMAP, then TSNE
    assert pick_label({"PCA": 0.8, "TSNE": 0.8, "UMAP": 0.8}) == "PCA"
    assert pick_label({"PCA": 0.1, "TSNE": 0.8, "UMAP": 0.8}) == "UMAP"


def test_meta_features_layout():
    ds = make_dataset(n_clusters=4, reads_per_cluster=5, center_len=40)
    k = 2
    feats = meta_features(ds, target_dim=8, k=k)
    assert feats.shape == (4 ** k + 5,)
    matrix = build_kmer_matrix(ds, k)
    np.testing.assert_allclose(feats[:16], matrix.values.mean(axis=0), atol=1e-12)
    n_reads, cluster_count, mean_len, dim, log_dim = feats[16:]
    assert n_reads == 20 and cluster_count == 4
    assert mean_len == pytest.approx(np.mean([len(r.bases) for r in ds.reads]))
    assert dim == 8.0 and log_dim == pytest.approx(3.0)
    assert len(scalar_feature_names()) == 5


def test_method_accuracies_keys_and_range():
    ds = make_dataset(n_clusters=4, reads_per_cluster=6, center_len=50, seed=2)
    m = build_kmer_matrix(ds, 3)
    accs = method_accuracies(
        m.values, m.row_labels, ds.cluster_count, 2, seed=0, stage="subtag",
        tsne=TsneParams(perplexity=5.0, n_iter=60), umap=UmapParams(n_neighbors=5, n_epochs=30),
        kmeans_n_init=2, kmeans_max_iter=50,
    )
    assert set(accs) == set(LABEL_ORDER)
    for v in accs.values():
        assert 0.0 <= v <= 1.0


def test_method_accuracies_order_independent():
    # each (method, dim) cell is seeded independently, so computing one dim
    # alone equals computing it alongside others
    ds = make_dataset(n_clusters=3, reads_per_cluster=6, center_len=40, seed=5)
    m = build_kmer_matrix(ds, 2)
    kw = dict(tsne=TsneParams(perplexity=4.0, n_iter=40),
              umap=UmapParams(n_neighbors=4, n_epochs=20),
              kmeans_n_init=2, kmeans_max_iter=40)
    a = method_accuracies(m.values, m.row_labels, 3, 2, 9, stage="subtag", **kw)
    b = method_accuracies(m.values, m.row_labels, 3, 2, 9, stage="subtag", **kw)
    assert a == b
    c = method_accuracies(m.values, m.row_labels, 3, 2, 9, stage="eval", **kw)
    assert set(c) == set(a)  # different stage reseeds, same contract


def test_sub_tag_shape_and_provenance():
    ds = make_dataset(n_clusters=4, reads_per_cluster=6, center_len=50, seed=1)
    dims = [2, 3]
    tags = sub_tag(
        ds, dims, k=2, seed=3,
        tsne=TsneParams(perplexity=5.0, n_iter=50),
        umap=UmapParams(n_neighbors=5, n_epochs=25),
        kmeans_n_init=2, kmeans_max_iter=50,
    )
    assert len(tags) == len(dims)
    for tag, dim in zip(tags, dims):
        assert tag.label in LABEL_ORDER
        assert tag.provenance["target_dim"] == dim
        accs = tag.provenance["accuracies"]
        assert tag.label == pick_label(accs)
        assert tag.features.shape == (16 + 5,)


def test_sub_tag_deterministic():
    ds = make_dataset(n_clusters=3, reads_per_cluster=6, center_len=40, seed=8)
    kw = dict(tsne=TsneParams(perplexity=4.0, n_iter=40),
              umap=UmapParams(n_neighbors=4, n_epochs=20),
              kmeans_n_init=2, kmeans_max_iter=40)
    a = sub_tag(ds, [2], k=2, seed=5, **kw)
    b = sub_tag(ds, [2], k=2, seed=5, **kw)
    assert a[0].label == b[0].label
    np.testing.assert_array_equal(a[0].features, b[0].features)
    assert a[0].provenance == b[0].provenance


def test_sub_tag_validation():
    ds = make_dataset(n_clusters=1, reads_per_cluster=6, center_len=40)
    with pytest.raises(ValueError):
        sub_tag(ds, [2], k=2, seed=0)
    ds2 = make_dataset(n_clusters=3, reads_per_cluster=4, center_len=40)
    with pytest.raises(ValueError):
        sub_tag(ds2, [12], k=2, seed=0)  # dim > n - 1
    ds3 = make_dataset(n_clusters=3, reads_per_cluster=8, center_len=40)
    with pytest.raises(ValueError):
        sub_tag(ds3, [17], k=2, seed=0)  # dim > 4^k
