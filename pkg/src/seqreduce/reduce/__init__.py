"""Dimensionality reduction: PCA, exact t-SNE, and UMAP behind one spec type."""

from __future__ import annotations

import numpy as np

from seqreduce.reduce._types import METHODS, Embedding, ReductionSpec, TsneParams, UmapParams
from seqreduce.reduce.pca import PcaModel, pca_fit, pca_transform
from seqreduce.reduce.tsne import tsne_embed
from seqreduce.reduce.umap import umap_embed

__all__ = [
    "METHODS", "Embedding", "ReductionSpec", "TsneParams", "UmapParams",
    "PcaModel", "pca_fit", "pca_transform", "tsne_embed", "umap_embed",
    "reduce_embed", "write_embedding_csv",
]


def reduce_embed(X: np.ndarray, spec: ReductionSpec) -> Embedding:
    """Run the method the ReductionSpec names; the result carries it along."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("input must be a 2-d matrix")
    if not np.isfinite(X).all():
        raise ValueError("input contains non-finite values")
    if spec.method == "PCA":
        model = pca_fit(X, spec.target_dim)
        coords = pca_transform(model, X)
        return Embedding(
            coords=coords,
            spec=spec,
            diagnostics={"explained_variance_ratio": float(model.explained_variance_ratio.sum())},
        )
    if spec.method == "TSNE":
        return tsne_embed(X, spec)
    return umap_embed(X, spec)


def write_embedding_csv(emb: Embedding, path) -> None:
    """Coordinates as CSV; the header row echoes the producing spec."""
    d = emb.coords.shape[1]
    header = [f"{emb.spec.method.lower()}_dim{j}" for j in range(d)]
    with open(path, "w") as fh:
        fh.write("# method=%s target_dim=%d seed=%d\n" % (emb.spec.method, emb.spec.target_dim, emb.spec.seed))
        fh.write(",".join(header) + "\n")
        for row in emb.coords:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
