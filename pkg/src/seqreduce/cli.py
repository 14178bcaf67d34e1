"""Command line interface.

Config resolution precedence for every command: explicit flag > config file
(or the config embedded in a manifest passed via --from-manifest) > built-in
default.  Each command writes a manifest next to its outputs; re-running a
command from that manifest reproduces the outputs byte-identically.
"""

from __future__ import annotations

import time
from dataclasses import replace
from pathlib import Path

import click

from seqreduce import __version__, pipeline
from seqreduce.config import (
    RunConfig,
    apply_overrides,
    file_digest,
    load_config,
    read_manifest,
    write_manifest,
)
from seqreduce.dataset import FormatError


def _common_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="JSON config file."),
        click.option("--from-manifest", "manifest_path",
                     type=click.Path(exists=True, dir_okay=False), default=None,
                     help="Re-run using the config stored in a previous run's manifest."),
        click.option("--output-dir", type=click.Path(file_okay=False), default=None,
                     help="Directory for outputs and the manifest."),
        click.option("--seed", type=int, default=None, help="Root seed for all randomness."),
        click.option("--k", type=int, default=None, help="Length of the nucleotide words counted."),
        click.option("--dims", type=str, default=None,
                     help="Comma-separated target dimensions, e.g. 2,3,50."),
        click.option("--clusters", "clusters_path", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="Clusters-format dataset file."),
        click.option("--centers", "centers_path", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="Centers-format reference file."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _resolve(config_path, manifest_path, overrides: dict) -> tuple[RunConfig, dict]:
    """Base config from manifest or file, then flag overrides.  Returns the
    resolved config plus the manifest's recorded inputs (empty otherwise)."""
    if config_path and manifest_path:
        raise click.UsageError("--config and --from-manifest are mutually exclusive")
    try:
        inputs = {}
        if manifest_path:
            doc = read_manifest(manifest_path)
            base = doc["config"]
            inputs = doc["inputs"]
        elif config_path:
            base = load_config(config_path)
        else:
            base = RunConfig()
        return apply_overrides(base, overrides), inputs
    except OSError as exc:
        raise click.ClickException(f"file error: {exc}") from exc
    except ValueError as exc:
        raise click.ClickException(f"invalid input: {exc}") from exc


def _execute(command: str, config: RunConfig, stage, inputs: dict | None = None) -> None:
    """Run one stage function, then write the manifest with output digests."""
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    try:
        outputs = stage(config, outdir, timings)
    except FormatError as exc:
        raise click.ClickException(f"format error: {exc}") from exc
    except OSError as exc:
        raise click.ClickException(f"file error: {exc}") from exc
    except ValueError as exc:
        raise click.ClickException(f"invalid input: {exc}") from exc
    timings.setdefault("total", round(time.perf_counter() - t0, 3))
    digests = {name: file_digest(path) for name, path in outputs.items()}
    manifest_path = outdir / f"{command.replace('-', '_')}_manifest.json"
    write_manifest(manifest_path, command=command, version=__version__, config=config,
                   outputs=digests, timings=timings, inputs=inputs or {})
    for name in outputs:
        click.echo(f"wrote {outdir / name}")
    click.echo(f"wrote {manifest_path}")


@click.group()
@click.version_option(__version__, prog_name="seqreduce")
def main() -> None:
    """Dimensionality-reduction selection pipeline for DNA read clustering."""


@main.command("gen-synthetic")
@_common_options
@click.option("--n-clusters", type=int, default=None, help="Number of synthetic clusters.")
@click.option("--reads-per-cluster", type=int, default=None)
@click.option("--center-len", type=int, default=None, help="Length of each cluster center.")
@click.option("--substitution-rate", type=float, default=None)
@click.option("--insertion-rate", type=float, default=None)
@click.option("--deletion-rate", type=float, default=None)
def gen_synthetic(config_path, manifest_path, n_clusters, reads_per_cluster, center_len,
                  substitution_rate, insertion_rate, deletion_rate, **flags):
    """Write a synthetic Centers/Clusters dataset pair."""
    config, inputs = _resolve(config_path, manifest_path, flags)
    syn_over = {
        name: value
        for name, value in (
            ("n_clusters", n_clusters),
            ("reads_per_cluster", reads_per_cluster),
            ("center_len", center_len),
            ("substitution_rate", substitution_rate),
            ("insertion_rate", insertion_rate),
            ("deletion_rate", deletion_rate),
        )
        if value is not None
    }
    if syn_over:
        config = replace(config, synthetic=replace(config.synthetic, **syn_over))
    _execute("gen-synthetic", config,
             lambda cfg, outdir, timings: pipeline.run_gen_synthetic(cfg, outdir),
             inputs=inputs)


@main.command("subtag")
@_common_options
@click.option("--train-subsets", type=int, default=None, help="Training subsets to sample.")
@click.option("--clusters-per-subset", type=int, default=None)
@click.option("--split-ratio", type=float, default=None,
              help="Fraction of clusters assigned to the training side.")
def subtag(config_path, manifest_path, **flags):
    """Tag training subsets with the best reduction method per target dim."""
    config, inputs = _resolve(config_path, manifest_path, flags)
    _execute("subtag", config,
             lambda cfg, outdir, timings: pipeline.run_subtag(cfg, outdir),
             inputs=inputs)


@main.command("train")
@_common_options
@click.option("--tagged", "tagged_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Tagged-instance CSV (default: <output-dir>/tagged.csv).")
@click.option("--rounds", "boost_rounds", type=int, default=None, help="Boosting rounds.")
@click.option("--f1-target", type=float, default=None,
              help="Stop boosting once heldout weighted F1 reaches this.")
@click.option("--rfe-keep", type=int, default=None, help="Features kept by elimination.")
@click.option("--heldout-fraction", type=float, default=None)
def train(config_path, manifest_path, tagged_path, **flags):
    """Train the method-selector network from tagged instances."""
    config, inputs = _resolve(config_path, manifest_path, flags)
    resolved_tagged = (
        tagged_path or inputs.get("tagged.csv") or str(Path(config.output_dir) / "tagged.csv")
    )
    _execute("train", config,
             lambda cfg, outdir, timings: pipeline.run_train(cfg, resolved_tagged, outdir),
             inputs={"tagged.csv": str(resolved_tagged)})


@main.command("evaluate")
@_common_options
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Selector model file (default: <output-dir>/selector.json).")
@click.option("--test-subsets", type=int, default=None, help="Test subsets to sample.")
@click.option("--clusters-per-subset", type=int, default=None)
def evaluate(config_path, manifest_path, model_path, **flags):
    """Score the selector against the three fixed methods on test subsets."""
    config, inputs = _resolve(config_path, manifest_path, flags)
    resolved_model = (
        model_path or inputs.get("selector.json") or str(Path(config.output_dir) / "selector.json")
    )
    _execute("evaluate", config,
             lambda cfg, outdir, timings: pipeline.run_evaluate(cfg, resolved_model, outdir),
             inputs={"selector.json": str(resolved_model)})


@main.command("reproduce")
@_common_options
@click.option("--train-subsets", type=int, default=None)
@click.option("--test-subsets", type=int, default=None)
@click.option("--clusters-per-subset", type=int, default=None)
@click.option("--rounds", "boost_rounds", type=int, default=None, help="Boosting rounds.")
def reproduce(config_path, manifest_path, **flags):
    """Run the whole pipeline end to end and render the accuracy figures."""
    config, inputs = _resolve(config_path, manifest_path, flags)
    _execute("reproduce", config, pipeline.run_reproduce, inputs=inputs)


if __name__ == "__main__":
    main()
