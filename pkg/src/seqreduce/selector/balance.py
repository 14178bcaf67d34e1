"""Synthetic minority oversampling for the tagged meta-instances."""

from __future__ import annotations

import warnings

import numpy as np

from seqreduce.seeding import rng_for
from seqreduce.selector.tagging import LABEL_ORDER, TaggedInstance


def smote_balance(instances: list[TaggedInstance], k_neighbors: int = 5,
                  seed: int = 0) -> list[TaggedInstance]:
    """Upsample every class to the majority count.

    Each synthetic point is x + u * (x_nn - x) with u uniform in [0, 1) and
    x_nn one of the k nearest same-class neighbors (k clamped to class size
    minus 1).  A singleton class cannot interpolate, so it is duplicated
    exactly, with a warning.  Balanced input is returned unchanged.
    """
    if not instances:
        raise ValueError("no instances to balance")
    by_class: dict[str, list[int]] = {lab: [] for lab in LABEL_ORDER}
    for i, inst in enumerate(instances):
        by_class[inst.label].append(i)
    counts = {lab: len(ix) for lab, ix in by_class.items()}
    majority = max(counts.values())
    out = list(instances)
    for lab in LABEL_ORDER:
        ix = by_class[lab]
        need = majority - len(ix)
        if need == 0 or not ix:
            continue
        rng = rng_for(seed, "smote", lab)
        if len(ix) == 1:
            warnings.warn(
                f"class {lab} has a single instance; duplicating it instead of interpolating"
            )
            base = instances[ix[0]]
            for _ in range(need):
                out.append(
                    TaggedInstance(
                        features=base.features.copy(),
                        label=lab,
                        provenance={"synthetic": True, "parents": (ix[0], ix[0])},
                    )
                )
            continue
        X = np.stack([instances[i].features for i in ix])
        d2 = (
            np.einsum("ij,ij->i", X, X)[:, None]
            + np.einsum("ij,ij->i", X, X)[None, :]
            - 2.0 * (X @ X.T)
        )
        np.fill_diagonal(d2, np.inf)
        kk = min(k_neighbors, len(ix) - 1)
        nn = np.argsort(d2, axis=1, kind="stable")[:, :kk]
        for _ in range(need):
            a = int(rng.integers(len(ix)))
            b = int(nn[a, rng.integers(kk)])
            u = float(rng.random())
            feats = X[a] + u * (X[b] - X[a])
            out.append(
                TaggedInstance(
                    features=feats,
                    label=lab,
                    provenance={"synthetic": True, "parents": (ix[a], ix[b]), "u": u},
                )
            )
    return out
