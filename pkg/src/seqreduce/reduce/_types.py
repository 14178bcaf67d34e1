"""Shared types for the dimensionality-reduction methods."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

METHODS = ("PCA", "TSNE", "UMAP")


@dataclass(frozen=True)
class TsneParams:
    perplexity: float = 30.0
    n_iter: int = 300
    learning_rate: float = 200.0


@dataclass(frozen=True)
class UmapParams:
    n_neighbors: int = 15
    min_dist: float = 0.1
    spread: float = 1.0
    n_epochs: int = 200
    negative_sample_rate: int = 5
    repulsion_strength: float = 1.0


@dataclass(frozen=True)
class ReductionSpec:
    """Which method to run, at what output dimension, under which seed."""

    method: str
    target_dim: int
    seed: int = 0
    tsne: TsneParams = field(default_factory=TsneParams)
    umap: UmapParams = field(default_factory=UmapParams)

    def __post_init__(self):
        object.__setattr__(self, "method", self.method.upper())
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.target_dim < 1:
            raise ValueError("target_dim must be at least 1")
        if self.tsne.perplexity < 1:
            raise ValueError("perplexity must be at least 1")
        if self.umap.n_neighbors < 2:
            raise ValueError("n_neighbors must be at least 2")


@dataclass(frozen=True)
class Embedding:
    """Reduced coordinates plus the ReductionSpec that produced them and
    method-specific diagnostic scalars."""

    coords: np.ndarray
    spec: ReductionSpec
    diagnostics: dict

    def __post_init__(self):
        if not np.isfinite(self.coords).all():
            raise ValueError("embedding contains non-finite coordinates")
        self.coords.flags.writeable = False
