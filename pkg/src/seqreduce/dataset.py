"""Read datasets: file parsing, subset sampling, and synthetic generation.

File formats:

* centers file: one upper-case DNA sequence per line.
* clusters file: runs of sequence lines separated by delimiter lines; any
  line whose first four characters are ``====`` is a delimiter.  The i-th
  non-empty block becomes ground-truth cluster i.

All returned objects are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from seqreduce.seeding import rng_for

BASES = "ACGT"
_CODE = {c: i for i, c in enumerate(BASES)}
_VALID = re.compile(r"[ACGT]+\Z")


class FormatError(ValueError):
    """A dataset file violates the expected format."""


def encode_bases(bases: str) -> np.ndarray:
    """Map a sequence string to int8 codes A=0, C=1, G=2, T=3."""
    return np.array([_CODE[c] for c in bases], dtype=np.int8)


def decode_codes(codes: np.ndarray) -> str:
    return "".join(BASES[int(c)] for c in codes)


@dataclass(frozen=True)
class DnaRead:
    bases: str
    cluster_id: int | None = None

    def __post_init__(self):
        if not self.bases or not _VALID.match(self.bases):
            raise FormatError(f"read contains characters outside ACGT: {self.bases[:20]!r}")
        if self.cluster_id is not None and self.cluster_id < 0:
            raise ValueError("cluster_id must be non-negative")

    def __len__(self) -> int:
        return len(self.bases)


@dataclass(frozen=True)
class ReferenceSet:
    centers: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class GroundTruthDataset:
    reads: tuple[DnaRead, ...]
    cluster_count: int

    def __post_init__(self):
        if self.cluster_count <= 0:
            raise ValueError("cluster_count must be positive")
        seen = np.zeros(self.cluster_count, dtype=bool)
        for r in self.reads:
            if r.cluster_id is None or r.cluster_id >= self.cluster_count:
                raise ValueError(f"read cluster_id {r.cluster_id} outside [0, {self.cluster_count})")
            seen[r.cluster_id] = True
        if not seen.all():
            missing = int(np.flatnonzero(~seen)[0])
            raise ValueError(f"cluster {missing} has no reads (ids must be compacted)")

    def __len__(self) -> int:
        return len(self.reads)

    @property
    def labels(self) -> np.ndarray:
        return np.array([r.cluster_id for r in self.reads], dtype=np.int64)

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.cluster_count)


@dataclass(frozen=True)
class NoiseModel:
    substitution_rate: float = 0.05
    insertion_rate: float = 0.03
    deletion_rate: float = 0.03
    seed: int = 0

    def __post_init__(self):
        rates = (self.substitution_rate, self.insertion_rate, self.deletion_rate)
        for r in rates:
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"noise rate {r} outside [0, 1]")
        if sum(rates) >= 1.0:
            raise ValueError("noise rates must sum to less than 1")


# ---------------------------------------------------------------------------
# parsing and serialization


def _clean_line(raw: str, lineno: int) -> str | None:
    line = raw.strip()
    if not line:
        return None
    line = line.upper()
    if not _VALID.match(line):
        bad = next(c for c in line if c not in _CODE)
        raise FormatError(f"line {lineno}: invalid base character {bad!r}")
    return line


def parse_centers(path) -> ReferenceSet:
    """Read a centers file: one sequence per line, blank lines ignored."""
    centers = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = _clean_line(raw, lineno)
            if line is not None:
                centers.append(line)
    return ReferenceSet(tuple(centers))


def parse_clusters(path) -> GroundTruthDataset:
    """Read a clusters file: delimiter lines split the reads into clusters.

    Reads in the i-th non-empty block get cluster_id i; empty blocks are
    skipped so ids are compact.
    """
    reads: list[DnaRead] = []
    cluster = 0
    block_has_reads = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            if raw[:4] == "====":
                if block_has_reads:
                    cluster += 1
                    block_has_reads = False
                continue
            line = _clean_line(raw, lineno)
            if line is None:
                continue
            reads.append(DnaRead(line, cluster))
            block_has_reads = True
    if not reads:
        raise FormatError(f"{path}: no reads found")
    return GroundTruthDataset(tuple(reads), cluster + (1 if block_has_reads else 0))


def write_centers(refset: ReferenceSet, path) -> None:
    with open(path, "w") as fh:
        for c in refset.centers:
            fh.write(c + "\n")


def write_clusters(ds: GroundTruthDataset, path) -> None:
    """Write the clusters format; reads are grouped by cluster id."""
    by_cluster: list[list[str]] = [[] for _ in range(ds.cluster_count)]
    for r in ds.reads:
        by_cluster[r.cluster_id].append(r.bases)
    with open(path, "w") as fh:
        for j, block in enumerate(by_cluster):
            if j > 0:
                fh.write("=" * 20 + "\n")
            for bases in block:
                fh.write(bases + "\n")


# ---------------------------------------------------------------------------
# subset construction


def restrict_clusters(ds: GroundTruthDataset, keep: np.ndarray) -> GroundTruthDataset:
    """Dataset restricted to the given cluster ids (sorted), ids compacted."""
    keep = np.sort(np.asarray(keep, dtype=np.int64))
    remap = {int(c): i for i, c in enumerate(keep)}
    reads = tuple(
        DnaRead(r.bases, remap[r.cluster_id]) for r in ds.reads if r.cluster_id in remap
    )
    return GroundTruthDataset(reads, len(keep))


def sample_subsets(ds: GroundTruthDataset, n_subsets: int, clusters_per_subset: int,
                   seed: int) -> list[GroundTruthDataset]:
    """Draw subsets of whole clusters, uniformly without replacement within
    each subset; subsets are drawn independently so they may overlap."""
    if n_subsets <= 0 or clusters_per_subset <= 0:
        raise ValueError("n_subsets and clusters_per_subset must be positive")
    if clusters_per_subset > ds.cluster_count:
        raise ValueError(
            f"clusters_per_subset {clusters_per_subset} exceeds cluster count {ds.cluster_count}"
        )
    out = []
    for i in range(n_subsets):
        rng = rng_for(seed, "subset", i)
        chosen = rng.choice(ds.cluster_count, size=clusters_per_subset, replace=False)
        out.append(restrict_clusters(ds, chosen))
    return out


def slice_range(ds: GroundTruthDataset, lo: int, hi: int) -> GroundTruthDataset:
    """Dataset restricted to clusters [lo, hi), ids shifted down by lo."""
    if not (0 <= lo < hi <= ds.cluster_count):
        raise ValueError(f"bad cluster range [{lo}, {hi}) for {ds.cluster_count} clusters")
    return restrict_clusters(ds, np.arange(lo, hi))


# ---------------------------------------------------------------------------
# synthetic data


def _noisy_copy(center_codes: np.ndarray, noise: NoiseModel, rng: np.random.Generator) -> str:
    """One read: per-base i.i.d. deletion/substitution plus insertions."""
    n = center_codes.shape[0]
    u = rng.random(n)
    ins = rng.random(n) < noise.insertion_rate
    ins_base = rng.integers(0, 4, size=n)
    sub_shift = rng.integers(1, 4, size=n)  # guarantees a different base
    out = []
    p_del = noise.deletion_rate
    p_sub = noise.substitution_rate
    for i in range(n):
        if ins[i]:
            out.append(int(ins_base[i]))
        if u[i] < p_del:
            continue
        if u[i] < p_del + p_sub:
            out.append(int((center_codes[i] + sub_shift[i]) % 4))
        else:
            out.append(int(center_codes[i]))
    if not out:
        out.append(int(center_codes[0]))  # keep reads non-empty
    return decode_codes(np.array(out, dtype=np.int8))


def generate_synthetic(n_clusters: int, reads_per_cluster: int, center_len: int,
                       noise: NoiseModel) -> tuple[ReferenceSet, GroundTruthDataset]:
    """Random centers plus noisy copies of each; deterministic in noise.seed."""
    if n_clusters <= 0 or reads_per_cluster <= 0 or center_len < 1:
        raise ValueError("n_clusters, reads_per_cluster, center_len must be positive")
    center_rng = rng_for(noise.seed, "centers")
    codes = center_rng.integers(0, 4, size=(n_clusters, center_len))
    centers = tuple(decode_codes(row) for row in codes)
    reads = []
    for c in range(n_clusters):
        read_rng = rng_for(noise.seed, "reads", c)
        for _ in range(reads_per_cluster):
            reads.append(DnaRead(_noisy_copy(codes[c], noise, read_rng), c))
    return ReferenceSet(centers), GroundTruthDataset(tuple(reads), n_clusters)
