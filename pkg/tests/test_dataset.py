"""Dataset parsing, serialization, subset construction, and the noise model."""

import numpy as np
import pytest

from seqreduce.dataset import (
    BASES,
    DnaRead,
    FormatError,
    GroundTruthDataset,
    NoiseModel,
    ReferenceSet,
    decode_codes,
    encode_bases,
    generate_synthetic,
    parse_centers,
    parse_clusters,
    restrict_clusters,
    sample_subsets,
    slice_range,
    write_centers,
    write_clusters,
)

from conftest import dataset_from_strings


def test_encode_decode_roundtrip():
    seq = "ACGTTGCA"
    np.testing.assert_array_equal(encode_bases(seq), [0, 1, 2, 3, 3, 2, 1, 0])
    assert decode_codes(encode_bases(seq)) == seq


def test_bases_ordering():
    assert BASES == "ACGT"


def test_read_validation():
    with pytest.raises(FormatError):
        DnaRead("ACGU", 0)
    with pytest.raises(FormatError):
        DnaRead("", 0)
    with pytest.raises(ValueError):
        DnaRead("ACGT", -1)
    assert len(DnaRead("ACGT", 3)) == 4


def test_dataset_requires_compact_ids():
    reads = (DnaRead("ACGT", 0), DnaRead("ACGT", 2))
    with pytest.raises(ValueError):
        GroundTruthDataset(reads, 3)  # cluster 1 empty
    with pytest.raises(ValueError):
        GroundTruthDataset(reads, 2)  # id 2 out of range


def test_labels_and_sizes():
    ds = dataset_from_strings([["ACGT", "ACGA"], ["TTTT"], ["GGGG", "GGGC", "GGGA"]])
    np.testing.assert_array_equal(ds.labels, [0, 0, 1, 2, 2, 2])
    np.testing.assert_array_equal(ds.cluster_sizes(), [2, 1, 3])
    assert len(ds) == 6


def test_noise_model_validation():
    NoiseModel(0.1, 0.1, 0.1)
    with pytest.raises(ValueError):
        NoiseModel(substitution_rate=1.2)
    with pytest.raises(ValueError):
        NoiseModel(0.5, 0.3, 0.3)  # rates sum to >= 1


# ---------------------------------------------------------------------------
# file formats


def test_parse_centers(tmp_path):
    p = tmp_path / "centers.txt"
    p.write_text("ACGT\n\nacgt\nTTTT\n")
    refs = parse_centers(p)
    assert refs.centers == ("ACGT", "ACGT", "TTTT")  # lowercase accepted, blanks skipped
    assert len(refs) == 3


def test_parse_centers_rejects_bad_base(tmp_path):
    p = tmp_path / "centers.txt"
    p.write_text("ACGT\nACXT\n")
    with pytest.raises(FormatError, match="line 2"):
        parse_centers(p)


def test_parse_clusters_blocks(tmp_path):
    p = tmp_path / "clusters.txt"
    p.write_text("AAAA\nAAAT\n" + "=" * 20 + "\nCCCC\n" + "=" * 20 + "\nGGGG\nGGGT\nGGGA\n")
    ds = parse_clusters(p)
    assert ds.cluster_count == 3
    np.testing.assert_array_equal(ds.labels, [0, 0, 1, 2, 2, 2])


def test_parse_clusters_skips_empty_blocks(tmp_path):
    p = tmp_path / "clusters.txt"
    p.write_text("====\nAAAA\n====\n====\n\n====\nCCCC\n====\n")
    ds = parse_clusters(p)
    assert ds.cluster_count == 2
    np.testing.assert_array_equal(ds.labels, [0, 1])


def test_parse_clusters_short_delimiter_is_data(tmp_path):
    p = tmp_path / "clusters.txt"
    p.write_text("AAAA\n===\nCCCC\n")  # 3 equals: not a delimiter, not a base
    with pytest.raises(FormatError):
        parse_clusters(p)


def test_parse_clusters_empty_file(tmp_path):
    p = tmp_path / "clusters.txt"
    p.write_text("====\n====\n")
    with pytest.raises(FormatError, match="no reads"):
        parse_clusters(p)


def test_clusters_roundtrip(tmp_path):
    ds = dataset_from_strings([["ACGT", "ACGA"], ["TTTT"], ["GGGG", "GGGC"]])
    p = tmp_path / "clusters.txt"
    write_clusters(ds, p)
    back = parse_clusters(p)
    assert back == ds


def test_centers_roundtrip(tmp_path):
    refs = ReferenceSet(("ACGT", "TTTTA", "GGGCC"))
    p = tmp_path / "centers.txt"
    write_centers(refs, p)
    assert parse_centers(p) == refs


# ---------------------------------------------------------------------------
# subset construction


def test_restrict_clusters_compacts_and_sorts():
    ds = dataset_from_strings([["AAAA"], ["CCCC", "CCCA"], ["GGGG"], ["TTTT"]])
    sub = restrict_clusters(ds, np.array([3, 1]))
    assert sub.cluster_count == 2
    # keep ids are sorted, so cluster 1 -> 0 and cluster 3 -> 1
    assert [r.bases for r in sub.reads] == ["CCCC", "CCCA", "TTTT"]
    np.testing.assert_array_equal(sub.labels, [0, 0, 1])


def test_slice_range():
    ds = dataset_from_strings([["AAAA"], ["CCCC"], ["GGGG"], ["TTTT"]])
    sub = slice_range(ds, 1, 3)
    assert [r.bases for r in sub.reads] == ["CCCC", "GGGG"]
    with pytest.raises(ValueError):
        slice_range(ds, 2, 2)
    with pytest.raises(ValueError):
        slice_range(ds, 0, 5)


def test_sample_subsets_shape_and_determinism():
    ds = dataset_from_strings([[f"{b}AAA", f"{b}AAT"] for b in "ACGT"])
    subs = sample_subsets(ds, 3, 2, seed=9)
    assert len(subs) == 3
    for s in subs:
        assert s.cluster_count == 2
        assert len(s.reads) == 4
    again = sample_subsets(ds, 3, 2, seed=9)
    assert subs == again
    assert sample_subsets(ds, 3, 2, seed=10) != subs


def test_sample_subsets_validation():
    ds = dataset_from_strings([["AAAA"], ["CCCC"]])
    with pytest.raises(ValueError):
        sample_subsets(ds, 0, 1, seed=0)
    with pytest.raises(ValueError):
        sample_subsets(ds, 1, 3, seed=0)


# ---------------------------------------------------------------------------
# synthetic generation


def test_generate_zero_noise_copies_center():
    noise = NoiseModel(0.0, 0.0, 0.0, seed=5)
    refs, ds = generate_synthetic(4, 6, 30, noise)
    assert len(refs) == 4 and len(ds) == 24
    for r in ds.reads:
        assert r.bases == refs.centers[r.cluster_id]


def test_generate_deterministic():
    noise = NoiseModel(0.05, 0.02, 0.02, seed=11)
    a = generate_synthetic(3, 4, 40, noise)
    b = generate_synthetic(3, 4, 40, noise)
    assert a == b
    c = generate_synthetic(3, 4, 40, NoiseModel(0.05, 0.02, 0.02, seed=12))
    assert a != c


def test_substitution_rate_monte_carlo():
    # substitution-only noise: per-base mismatch frequency converges on the
    # configured rate (binomial std for n=60000 at p=0.1 is about 0.0012)
    noise = NoiseModel(0.1, 0.0, 0.0, seed=3)
    refs, ds = generate_synthetic(3, 200, 100, noise)
    mismatches = total = 0
    for r in ds.reads:
        center = refs.centers[r.cluster_id]
        assert len(r.bases) == len(center)  # no indels configured
        mismatches += sum(a != b for a, b in zip(r.bases, center))
        total += len(center)
    assert abs(mismatches / total - 0.1) < 0.01


def test_indel_rates_monte_carlo():
    # with deletions only, expected length is (1 - p_del) * center_len;
    # with insertions only, (1 + p_ins) * center_len
    dele = NoiseModel(0.0, 0.0, 0.2, seed=4)
    _, ds = generate_synthetic(2, 300, 100, dele)
    mean_len = np.mean([len(r) for r in ds.reads])
    assert abs(mean_len - 80.0) < 1.5

    ins = NoiseModel(0.0, 0.2, 0.0, seed=4)
    _, ds = generate_synthetic(2, 300, 100, ins)
    mean_len = np.mean([len(r) for r in ds.reads])
    assert abs(mean_len - 120.0) < 1.5


def test_generate_validation():
    with pytest.raises(ValueError):
        generate_synthetic(0, 5, 10, NoiseModel())
    with pytest.raises(ValueError):
        generate_synthetic(5, 5, 0, NoiseModel())
