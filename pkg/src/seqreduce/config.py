"""Run configuration and manifests.

A RunConfig resolves from three layers with increasing precedence:
built-in defaults, a JSON config file, and command-line flag overrides.
Every command writes a RunManifest recording the resolved config, tool
version, per-stage wall-clock, and a digest of every output file; re-running
a command from its manifest reproduces the output files byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace

from seqreduce.reduce import TsneParams, UmapParams
from seqreduce.selector.mlp import MlpConfig


@dataclass(frozen=True)
class SyntheticConfig:
    """Generation parameters for the synthetic stand-in dataset."""

    n_clusters: int = 40
    reads_per_cluster: int = 12
    center_len: int = 110
    substitution_rate: float = 0.05
    insertion_rate: float = 0.03
    deletion_rate: float = 0.03


@dataclass(frozen=True)
class RunConfig:
    # data
    centers_path: str | None = None
    clusters_path: str | None = None
    output_dir: str = "runs"
    k: int = 5
    dims: tuple[int, ...] = (2, 3, 50, 300, 500, 700)
    split_ratio: float = 0.8
    train_subsets: int = 100
    test_subsets: int = 54
    clusters_per_subset: int = 100
    heldout_fraction: float = 0.25
    seed: int = 0
    # reduction hyperparameters
    tsne_perplexity: float = 30.0
    tsne_n_iter: int = 300
    tsne_learning_rate: float = 200.0
    umap_n_neighbors: int = 15
    umap_min_dist: float = 0.1
    umap_n_epochs: int = 200
    umap_negative_sample_rate: int = 5
    # clustering
    kmeans_n_init: int = 10
    kmeans_max_iter: int = 300
    # selector
    rfe_keep: int = 64
    boost_rounds: int = 3
    f1_target: float = 0.95
    cv_folds: int = 3
    mlp_max_epochs: int = 5000
    mlp_batch_size: int = 200
    grid_hidden_sizes: tuple[tuple[int, ...], ...] = ((50,), (50, 50))
    grid_l2_alpha: tuple[float, ...] = (0.05, 0.001)
    grid_learning_rate: tuple[float, ...] = (0.001,)
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)

    def __post_init__(self):
        if not 0.0 < self.split_ratio < 1.0:
            raise ValueError("split_ratio must be in (0, 1)")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        cap = 4 ** self.k
        for d in self.dims:
            if not 1 <= d <= cap:
                raise ValueError(f"dim {d} exceeds the 4^k={cap} feature count")
        if not 0.0 < self.heldout_fraction < 1.0:
            raise ValueError("heldout_fraction must be in (0, 1)")

    # builders for the stage parameter objects
    def tsne_params(self) -> TsneParams:
        return TsneParams(
            perplexity=self.tsne_perplexity,
            n_iter=self.tsne_n_iter,
            learning_rate=self.tsne_learning_rate,
        )

    def umap_params(self) -> UmapParams:
        return UmapParams(
            n_neighbors=self.umap_n_neighbors,
            min_dist=self.umap_min_dist,
            n_epochs=self.umap_n_epochs,
            negative_sample_rate=self.umap_negative_sample_rate,
        )

    def mlp_base(self) -> MlpConfig:
        return MlpConfig(max_epochs=self.mlp_max_epochs, batch_size=self.mlp_batch_size)

    def grid(self) -> dict:
        return {
            "hidden_sizes": [tuple(h) for h in self.grid_hidden_sizes],
            "l2_alpha": list(self.grid_l2_alpha),
            "learning_rate": list(self.grid_learning_rate),
        }


def config_to_dict(config: RunConfig) -> dict:
    return asdict(config)


def config_from_dict(doc: dict) -> RunConfig:
    doc = dict(doc)
    if "synthetic" in doc and isinstance(doc["synthetic"], dict):
        doc["synthetic"] = SyntheticConfig(**doc["synthetic"])
    if "dims" in doc:
        doc["dims"] = tuple(int(d) for d in doc["dims"])
    if "grid_hidden_sizes" in doc:
        doc["grid_hidden_sizes"] = tuple(tuple(int(u) for u in h) for h in doc["grid_hidden_sizes"])
    for key in ("grid_l2_alpha", "grid_learning_rate"):
        if key in doc:
            doc[key] = tuple(doc[key])
    return RunConfig(**doc)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def save_config(config: RunConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(config_to_dict(config), fh, indent=1)


def apply_overrides(config: RunConfig, overrides: dict) -> RunConfig:
    """Replace fields from a {name: value} dict, skipping None values."""
    clean = {k: v for k, v in overrides.items() if v is not None}
    if not clean:
        return config
    if "dims" in clean and isinstance(clean["dims"], str):
        clean["dims"] = tuple(int(d) for d in clean["dims"].split(","))
    return replace(config, **clean)


# ---------------------------------------------------------------------------
# manifests


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, *, command: str, version: str, config: RunConfig,
                   outputs: dict[str, str], timings: dict[str, float],
                   inputs: dict[str, str] | None = None) -> None:
    doc = {
        "command": command,
        "version": version,
        "config": config_to_dict(config),
        "inputs": dict(inputs or {}),
        "outputs": outputs,
        "timings_seconds": timings,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def read_manifest(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("command", "config", "outputs"):
        if key not in doc:
            raise ValueError(f"manifest {path} missing {key!r}")
    doc["config"] = config_from_dict(doc["config"])
    doc.setdefault("inputs", {})
    return doc
