"""Pipeline stages behind the CLI commands.

Every stage function takes a resolved RunConfig plus an output directory and
returns an ordered {relative_name: absolute_path} dict of the files it
wrote.  All CSV numbers are written with repr so re-runs are byte-identical
and parsing them back loses nothing.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from seqreduce.config import RunConfig
from seqreduce.dataset import (
    GroundTruthDataset,
    NoiseModel,
    generate_synthetic,
    parse_clusters,
    restrict_clusters,
    sample_subsets,
    write_centers,
    write_clusters,
)
from seqreduce.features import build_kmer_matrix
from seqreduce.seeding import derive_seed, rng_for
from seqreduce.selector import (
    LABEL_ORDER,
    TaggedInstance,
    boost_train,
    load_selector,
    meta_features,
    method_accuracies,
    save_selector,
    sub_tag,
)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# dataset plumbing


def load_dataset(config: RunConfig) -> GroundTruthDataset:
    """The configured clusters file, or a synthetic stand-in when none is
    configured (generation is seeded from the run seed)."""
    if config.clusters_path:
        return parse_clusters(config.clusters_path)
    syn = config.synthetic
    noise = NoiseModel(
        substitution_rate=syn.substitution_rate,
        insertion_rate=syn.insertion_rate,
        deletion_rate=syn.deletion_rate,
        seed=derive_seed(config.seed, "synthetic"),
    )
    _, ds = generate_synthetic(syn.n_clusters, syn.reads_per_cluster, syn.center_len, noise)
    return ds


def split_train_test(ds: GroundTruthDataset, ratio: float, seed: int
                     ) -> tuple[GroundTruthDataset, GroundTruthDataset]:
    """Seeded partition of whole clusters into train and test datasets."""
    perm = rng_for(seed, "split").permutation(ds.cluster_count)
    n_train = int(round(ratio * ds.cluster_count))
    n_train = min(max(n_train, 1), ds.cluster_count - 1)
    return restrict_clusters(ds, perm[:n_train]), restrict_clusters(ds, perm[n_train:])


# ---------------------------------------------------------------------------
# tagged-instance CSV


def write_tagged_csv(instances: list[TaggedInstance], path) -> None:
    n_feat = instances[0].features.shape[0] if instances else 0
    header = (
        ["subset_id", "target_dim", "label", "acc_pca", "acc_tsne", "acc_umap"]
        + [f"feat_{i}" for i in range(n_feat)]
    )
    rows = []
    for inst in instances:
        prov = inst.provenance
        accs = prov.get("accuracies", {})
        rows.append(
            [prov.get("subset_id", -1), prov.get("target_dim", -1), inst.label]
            + [float(accs.get(m, float("nan"))) for m in ("PCA", "TSNE", "UMAP")]
            + [float(v) for v in inst.features]
        )
    _write_csv(path, header, rows)


def read_tagged_csv(path) -> list[TaggedInstance]:
    instances = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        feat_cols = [c for c in reader.fieldnames if c.startswith("feat_")]
        feat_cols.sort(key=lambda c: int(c.split("_", 1)[1]))
        for row in reader:
            feats = np.array([float(row[c]) for c in feat_cols])
            instances.append(
                TaggedInstance(
                    features=feats,
                    label=row["label"],
                    provenance={
                        "subset_id": int(row["subset_id"]),
                        "target_dim": int(row["target_dim"]),
                        "accuracies": {
                            "PCA": float(row["acc_pca"]),
                            "TSNE": float(row["acc_tsne"]),
                            "UMAP": float(row["acc_umap"]),
                        },
                    },
                )
            )
    return instances


# ---------------------------------------------------------------------------
# stages


def run_gen_synthetic(config: RunConfig, outdir: Path) -> dict[str, str]:
    syn = config.synthetic
    noise = NoiseModel(
        substitution_rate=syn.substitution_rate,
        insertion_rate=syn.insertion_rate,
        deletion_rate=syn.deletion_rate,
        seed=derive_seed(config.seed, "synthetic"),
    )
    refs, ds = generate_synthetic(syn.n_clusters, syn.reads_per_cluster, syn.center_len, noise)
    centers_path = outdir / "centers.txt"
    clusters_path = outdir / "clusters.txt"
    write_centers(refs, centers_path)
    write_clusters(ds, clusters_path)
    return {"centers.txt": str(centers_path), "clusters.txt": str(clusters_path)}


def run_subtag(config: RunConfig, outdir: Path) -> dict[str, str]:
    ds = load_dataset(config)
    train_ds, _ = split_train_test(ds, config.split_ratio, config.seed)
    subsets = sample_subsets(
        train_ds, config.train_subsets, config.clusters_per_subset,
        derive_seed(config.seed, "train-subsets"),
    )
    instances = []
    for sid, subset in enumerate(subsets):
        instances.extend(
            sub_tag(
                subset, list(config.dims), config.k, config.seed,
                subset_id=sid,
                tsne=config.tsne_params(), umap=config.umap_params(),
                kmeans_n_init=config.kmeans_n_init, kmeans_max_iter=config.kmeans_max_iter,
            )
        )
    path = outdir / "tagged.csv"
    write_tagged_csv(instances, path)
    return {"tagged.csv": str(path)}


def run_train(config: RunConfig, tagged_path, outdir: Path) -> dict[str, str]:
    instances = read_tagged_csv(tagged_path)
    labels = {inst.label for inst in instances}
    if len(labels) < 2:
        raise ValueError(
            f"tagged instances contain a single class {labels}; "
            "tag more subsets or more target dims to diversify the labels"
        )
    perm = rng_for(config.seed, "heldout").permutation(len(instances))
    n_held = max(1, int(round(config.heldout_fraction * len(instances))))
    n_held = min(n_held, len(instances) - 1)
    heldout = [instances[i] for i in perm[:n_held]]
    pool = [instances[i] for i in perm[n_held:]]
    model, reports = boost_train(
        pool, heldout,
        rounds=config.boost_rounds, f1_target=config.f1_target,
        seed=derive_seed(config.seed, "boost"),
        k=config.k, rfe_keep=config.rfe_keep,
        grid=config.grid(), folds=config.cv_folds, mlp_base=config.mlp_base(),
    )
    model_path = outdir / "selector.json"
    save_selector(model, model_path)
    rounds_path = outdir / "rounds.csv"
    _write_csv(
        rounds_path,
        ["round", "accuracy", "weighted_precision", "weighted_recall", "weighted_f1"],
        [
            [r, rep.accuracy, rep.weighted_precision, rep.weighted_recall, rep.weighted_f1]
            for r, rep in enumerate(reports)
        ],
    )
    return {"selector.json": str(model_path), "rounds.csv": str(rounds_path)}


def _evaluate_cells(config: RunConfig, model, subsets) -> list[dict]:
    """Per (subset, dim): the three fixed-method accuracies plus the
    selector's choice.  The selected accuracy is the chosen method's cell,
    so it always equals one of the three fixed columns."""
    cells = []
    for sid, subset in enumerate(subsets):
        matrix = build_kmer_matrix(subset, config.k)
        for dim in config.dims:
            accs = method_accuracies(
                matrix.values, matrix.row_labels, subset.cluster_count, dim,
                config.seed, stage="eval", subset_id=sid,
                tsne=config.tsne_params(), umap=config.umap_params(),
                kmeans_n_init=config.kmeans_n_init, kmeans_max_iter=config.kmeans_max_iter,
            )
            selected = model.predict(meta_features(subset, dim, config.k))
            cells.append(
                {
                    "subset_id": sid,
                    "dim": dim,
                    "accs": accs,
                    "selected_method": selected,
                    "acc_selected": accs[selected],
                }
            )
    return cells


def _dim_table(cells: list[dict], dims) -> list[list]:
    rows = []
    for dim in dims:
        sub = [c for c in cells if c["dim"] == dim]
        rows.append(
            [
                dim,
                float(np.mean([c["acc_selected"] for c in sub])),
                float(np.mean([c["accs"]["PCA"] for c in sub])),
                float(np.mean([c["accs"]["TSNE"] for c in sub])),
                float(np.mean([c["accs"]["UMAP"] for c in sub])),
            ]
        )
    return rows


def _method_means(cells: list[dict]) -> list[list]:
    rows = [
        [m, float(np.mean([c["accs"][m] for c in cells]))] for m in LABEL_ORDER
    ]
    rows.append(["SELECTED", float(np.mean([c["acc_selected"] for c in cells]))])
    return rows


def run_evaluate(config: RunConfig, model_path, outdir: Path) -> dict[str, str]:
    model = load_selector(model_path)
    ds = load_dataset(config)
    _, test_ds = split_train_test(ds, config.split_ratio, config.seed)
    subsets = sample_subsets(
        test_ds, config.test_subsets, config.clusters_per_subset,
        derive_seed(config.seed, "test-subsets"),
    )
    cells = _evaluate_cells(config, model, subsets)
    outputs = {}
    cells_path = outdir / "cells.csv"
    _write_csv(
        cells_path,
        ["subset_id", "dim", "acc_pca", "acc_tsne", "acc_umap", "selected_method", "acc_selected"],
        [
            [
                c["subset_id"], c["dim"],
                c["accs"]["PCA"], c["accs"]["TSNE"], c["accs"]["UMAP"],
                c["selected_method"], c["acc_selected"],
            ]
            for c in cells
        ],
    )
    outputs["cells.csv"] = str(cells_path)
    dim_path = outdir / "dim_table.csv"
    _write_csv(
        dim_path,
        ["dim", "mean_acc_selected", "mean_acc_pca", "mean_acc_tsne", "mean_acc_umap"],
        _dim_table(cells, config.dims),
    )
    outputs["dim_table.csv"] = str(dim_path)
    means_path = outdir / "method_means.csv"
    _write_csv(means_path, ["method", "mean_accuracy"], _method_means(cells))
    outputs["method_means.csv"] = str(means_path)
    return outputs


# ---------------------------------------------------------------------------
# figures


def plot_line_csv(csv_path, png_path) -> None:
    """Accuracy-versus-dimension line chart rendered purely from the CSV."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    dims = [int(r["dim"]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for col, label, marker in (
        ("mean_acc_pca", "PCA", "o"),
        ("mean_acc_tsne", "t-SNE", "s"),
        ("mean_acc_umap", "UMAP", "^"),
        ("mean_acc_selected", "selected", "d"),
    ):
        ax.plot(range(len(dims)), [float(r[col]) for r in rows], marker=marker, label=label)
    ax.set_xticks(range(len(dims)))
    ax.set_xticklabels([str(d) for d in dims])
    ax.set_xlabel("target dimension")
    ax.set_ylabel("mean clustering accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120, metadata={"Software": "seqreduce"})
    plt.close(fig)


def plot_bar_csv(csv_path, png_path) -> None:
    """Mean-accuracy bar chart rendered purely from the CSV."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    names = [r["method"] for r in rows]
    values = [float(r["mean_accuracy"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, values, color=["#4878d0", "#ee854a", "#6acc64", "#d65f5f"][: len(names)])
    ax.set_ylabel("mean clustering accuracy")
    ax.set_ylim(0.0, 1.05)
    for i, v in enumerate(values):
        ax.text(i, v + 0.01, f"{v:.3f}", ha="center", fontsize=9)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120, metadata={"Software": "seqreduce"})
    plt.close(fig)


def run_reproduce(config: RunConfig, outdir: Path,
                  timings: dict[str, float] | None = None) -> dict[str, str]:
    """Full chain: tag training subsets, train the selector, evaluate the
    test subsets, and render the accuracy figures."""
    from time import perf_counter

    if timings is None:
        timings = {}
    outputs = {}
    t0 = perf_counter()
    outputs.update(run_subtag(config, outdir))
    timings["subtag"] = round(perf_counter() - t0, 3)
    t0 = perf_counter()
    outputs.update(run_train(config, outputs["tagged.csv"], outdir))
    timings["train"] = round(perf_counter() - t0, 3)
    t0 = perf_counter()
    outputs.update(run_evaluate(config, outputs["selector.json"], outdir))
    timings["evaluate"] = round(perf_counter() - t0, 3)
    t0 = perf_counter()
    line_png = outdir / "line_accuracy.png"
    plot_line_csv(outputs["dim_table.csv"], line_png)
    outputs["line_accuracy.png"] = str(line_png)
    bar_png = outdir / "mean_accuracy.png"
    plot_bar_csv(outputs["method_means.csv"], bar_png)
    outputs["mean_accuracy.png"] = str(bar_png)
    timings["figures"] = round(perf_counter() - t0, 3)
    return outputs
