"""Selector training loop and the persisted selector model.

Each round fits the full stack on the current pool: scaler, SMOTE balancing
in standardized space, recursive feature elimination, then a grid-searched
MLP.  Held-out instances the round misclassifies are appended (copied) to
the pool for the next round; the round with the best held-out weighted F1
becomes the returned model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from seqreduce.dataset import GroundTruthDataset
from seqreduce.features import ScalerStats, apply_scaler, fit_scaler
from seqreduce.reduce import ReductionSpec, TsneParams, UmapParams
from seqreduce.seeding import derive_seed
from seqreduce.selector.balance import smote_balance
from seqreduce.selector.metrics import ClassificationReport, evaluate_metrics
from seqreduce.selector.mlp import MlpConfig, MlpModel, grid_search, mlp_predict, mlp_train
from seqreduce.selector.rfe import rfe_select
from seqreduce.selector.tagging import LABEL_ORDER, TaggedInstance, meta_features

FORMAT_VERSION = 1

DEFAULT_GRID = {
    "hidden_sizes": [(50,), (50, 50)],
    "l2_alpha": [0.05, 0.001],
    "learning_rate": [0.001],
}


@dataclass(frozen=True)
class SelectorModel:
    """Everything needed to pick a reduction method for a new dataset:
    feature scaler, surviving-feature mask, trained MLP, the label order
    the outputs index into, and the k-mer length the features assume."""

    scaler: ScalerStats
    rfe_mask: np.ndarray
    mlp: MlpModel
    k: int
    label_order: tuple[str, ...] = LABEL_ORDER
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if int(self.rfe_mask.sum()) != self.mlp.n_inputs:
            raise ValueError("rfe_mask true-count must equal the MLP input size")

    def predict(self, features: np.ndarray) -> str:
        row = apply_scaler(self.scaler, features.reshape(1, -1))[:, self.rfe_mask]
        idx, _ = mlp_predict(self.mlp, row)
        return self.label_order[int(idx[0])]


def _pool_arrays(instances: list[TaggedInstance]) -> tuple[np.ndarray, np.ndarray]:
    X = np.stack([inst.features for inst in instances])
    y = np.array([inst.label_index for inst in instances], dtype=np.int64)
    return X, y


def _standardized_copy(inst: TaggedInstance, scaler: ScalerStats) -> TaggedInstance:
    feats = apply_scaler(scaler, inst.features.reshape(1, -1))[0]
    return TaggedInstance(feats, inst.label, dict(inst.provenance))


def boost_train(
    train_pool: list[TaggedInstance],
    heldout: list[TaggedInstance],
    rounds: int = 3,
    f1_target: float = 0.95,
    seed: int = 0,
    *,
    k: int,
    rfe_keep: int = 64,
    grid: dict | None = None,
    folds: int = 3,
    mlp_base: MlpConfig | None = None,
) -> tuple[SelectorModel, list[ClassificationReport]]:
    """Iterative training with held-out feedback; best round wins."""
    if not train_pool or not heldout:
        raise ValueError("train_pool and heldout must be non-empty")
    grid = grid if grid is not None else DEFAULT_GRID
    mlp_base = mlp_base or MlpConfig()
    held_X, held_y = _pool_arrays(heldout)
    pool = list(train_pool)
    reports: list[ClassificationReport] = []
    best: tuple[float, SelectorModel] | None = None
    for r in range(rounds):
        scaler = fit_scaler(_pool_arrays(pool)[0])
        standardized = [_standardized_copy(inst, scaler) for inst in pool]
        balanced = smote_balance(standardized, seed=derive_seed(seed, "boost-smote", r))
        X, y = _pool_arrays(balanced)
        n_keep = min(rfe_keep, X.shape[1])
        mask = rfe_select(X, y, n_keep)
        Xm = X[:, mask]
        best_params, _ = grid_search(
            Xm, y, grid, folds=folds, seed=derive_seed(seed, "boost-grid", r), base=mlp_base
        )
        config = MlpConfig(**{**mlp_base.__dict__, **best_params})
        mlp = mlp_train(Xm, y, config, seed=derive_seed(seed, "boost-fit", r))
        model = SelectorModel(scaler=scaler, rfe_mask=mask, mlp=mlp, k=k)

        held_scaled = apply_scaler(scaler, held_X)[:, mask]
        pred, _ = mlp_predict(mlp, held_scaled)
        report = evaluate_metrics(held_y, pred)
        reports.append(report)
        if best is None or report.weighted_f1 > best[0]:
            best = (report.weighted_f1, model)
        if report.weighted_f1 >= f1_target:
            break
        wrong = np.flatnonzero(pred != held_y)
        for i in wrong:
            pool.append(heldout[int(i)])
    return best[1], reports


def select_method(model: SelectorModel, subset: GroundTruthDataset, target_dim: int,
                  *, seed: int = 0, tsne: TsneParams | None = None,
                  umap: UmapParams | None = None) -> ReductionSpec:
    """Meta-featurize the subset, run the selector, and wrap the predicted
    method in a ready-to-run reduction spec."""
    feats = meta_features(subset, target_dim, model.k)
    method = model.predict(feats)
    return ReductionSpec(
        method, target_dim, seed=seed,
        tsne=tsne or TsneParams(), umap=umap or UmapParams(),
    )


# ---------------------------------------------------------------------------
# persistence


def save_selector(model: SelectorModel, path) -> None:
    doc = {
        "format_version": model.format_version,
        "k": model.k,
        "label_order": list(model.label_order),
        "scaler": {"mean": model.scaler.mean.tolist(), "std": model.scaler.std.tolist()},
        "rfe_mask": [int(v) for v in model.rfe_mask],
        "mlp": {
            "layer_sizes": list(model.mlp.layer_sizes),
            "weights": [W.tolist() for W in model.mlp.weights],
            "biases": [b.tolist() for b in model.mlp.biases],
            "config": {
                "hidden_sizes": list(model.mlp.config.hidden_sizes),
                "l2_alpha": model.mlp.config.l2_alpha,
                "learning_rate": model.mlp.config.learning_rate,
                "max_epochs": model.mlp.config.max_epochs,
                "batch_size": model.mlp.config.batch_size,
                "val_fraction": model.mlp.config.val_fraction,
                "patience": model.mlp.config.patience,
                "min_delta": model.mlp.config.min_delta,
            },
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_selector(path) -> SelectorModel:
    with open(path) as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported selector format_version {version!r}")
    cfg = doc["mlp"]["config"]
    config = MlpConfig(
        hidden_sizes=tuple(cfg["hidden_sizes"]),
        l2_alpha=cfg["l2_alpha"],
        learning_rate=cfg["learning_rate"],
        max_epochs=cfg["max_epochs"],
        batch_size=cfg["batch_size"],
        val_fraction=cfg["val_fraction"],
        patience=cfg["patience"],
        min_delta=cfg["min_delta"],
    )
    mlp = MlpModel(
        weights=tuple(np.array(W, dtype=np.float64) for W in doc["mlp"]["weights"]),
        biases=tuple(np.array(b, dtype=np.float64) for b in doc["mlp"]["biases"]),
        config=config,
    )
    return SelectorModel(
        scaler=ScalerStats(
            mean=np.array(doc["scaler"]["mean"], dtype=np.float64),
            std=np.array(doc["scaler"]["std"], dtype=np.float64),
        ),
        rfe_mask=np.array(doc["rfe_mask"], dtype=bool),
        mlp=mlp,
        k=int(doc["k"]),
        label_order=tuple(doc["label_order"]),
    )
