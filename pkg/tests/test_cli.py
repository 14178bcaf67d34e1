"""Command line interface: flag precedence, manifests, reproducible re-runs,
and categorized error reporting."""

import json

import pytest
from click.testing import CliRunner

from seqreduce.cli import main
from seqreduce.config import file_digest, save_config

from test_pipeline import mini_config, read_rows


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A saved mini config plus one completed subtag -> train -> evaluate
    chain driven through the CLI, shared by the cheaper assertions."""
    base = tmp_path_factory.mktemp("cli")
    rundir = base / "run"
    config = mini_config(rundir)
    config_path = base / "config.json"
    save_config(config, config_path)
    runner = CliRunner()
    for cmd in ("subtag", "train", "evaluate"):
        result = runner.invoke(main, [cmd, "--config", str(config_path)])
        assert result.exit_code == 0, result.output
    return {"base": base, "rundir": rundir, "config": config,
            "config_path": config_path}


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "seqreduce" in result.output


def test_help_lists_all_commands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for cmd in ("gen-synthetic", "subtag", "train", "evaluate", "reproduce"):
        assert cmd in result.output


def test_gen_synthetic_writes_files_and_manifest(runner, tmp_path):
    out = tmp_path / "gen"
    result = runner.invoke(main, [
        "gen-synthetic", "--output-dir", str(out), "--seed", "3",
        "--n-clusters", "4", "--reads-per-cluster", "3", "--center-len", "20",
    ])
    assert result.exit_code == 0, result.output
    assert (out / "centers.txt").exists()
    assert (out / "clusters.txt").exists()
    doc = json.loads((out / "gen_synthetic_manifest.json").read_text())
    assert doc["command"] == "gen-synthetic"
    assert doc["config"]["seed"] == 3
    assert doc["config"]["synthetic"]["n_clusters"] == 4
    assert set(doc["outputs"]) == {"centers.txt", "clusters.txt"}
    for name, digest in doc["outputs"].items():
        assert file_digest(out / name) == digest
    assert "total" in doc["timings_seconds"]
    for line in ("centers.txt", "clusters.txt", "gen_synthetic_manifest.json"):
        assert line in result.output


def test_chain_outputs_exist(workspace):
    rundir = workspace["rundir"]
    for name in ("tagged.csv", "selector.json", "rounds.csv", "cells.csv",
                 "dim_table.csv", "method_means.csv", "subtag_manifest.json",
                 "train_manifest.json", "evaluate_manifest.json"):
        assert (rundir / name).exists(), name
    config = workspace["config"]
    rows = read_rows(rundir / "tagged.csv")
    assert len(rows) == config.train_subsets * len(config.dims)


def test_train_manifest_records_tagged_input(workspace):
    doc = json.loads((workspace["rundir"] / "train_manifest.json").read_text())
    assert doc["inputs"] == {"tagged.csv": str(workspace["rundir"] / "tagged.csv")}
    doc = json.loads((workspace["rundir"] / "evaluate_manifest.json").read_text())
    assert doc["inputs"] == {"selector.json": str(workspace["rundir"] / "selector.json")}


def test_rerun_from_manifest_is_byte_identical(runner, workspace, tmp_path):
    rundir = workspace["rundir"]
    for cmd, manifest, names in (
        ("subtag", "subtag_manifest.json", ("tagged.csv",)),
        ("train", "train_manifest.json", ("selector.json", "rounds.csv")),
        ("evaluate", "evaluate_manifest.json",
         ("cells.csv", "dim_table.csv", "method_means.csv")),
    ):
        redo = tmp_path / f"redo_{cmd}"
        result = runner.invoke(main, [
            cmd, "--from-manifest", str(rundir / manifest),
            "--output-dir", str(redo),
        ])
        assert result.exit_code == 0, result.output
        for name in names:
            assert (redo / name).read_bytes() == (rundir / name).read_bytes(), name


def test_flag_beats_config_file(runner, workspace, tmp_path):
    out = tmp_path / "flagwin"
    result = runner.invoke(main, [
        "gen-synthetic", "--config", str(workspace["config_path"]),
        "--output-dir", str(out), "--seed", "99",
    ])
    assert result.exit_code == 0, result.output
    doc = json.loads((out / "gen_synthetic_manifest.json").read_text())
    assert doc["config"]["seed"] == 99  # flag wins
    assert doc["config"]["k"] == workspace["config"].k  # file wins over default


def test_dims_flag_parses_comma_list(runner, workspace, tmp_path):
    out = tmp_path / "dims"
    result = runner.invoke(main, [
        "gen-synthetic", "--config", str(workspace["config_path"]),
        "--output-dir", str(out), "--dims", "2,5",
    ])
    assert result.exit_code == 0, result.output
    doc = json.loads((out / "gen_synthetic_manifest.json").read_text())
    assert doc["config"]["dims"] == [2, 5]


def test_config_and_manifest_are_mutually_exclusive(runner, workspace):
    result = runner.invoke(main, [
        "subtag", "--config", str(workspace["config_path"]),
        "--from-manifest", str(workspace["rundir"] / "subtag_manifest.json"),
    ])
    assert result.exit_code != 0
    assert "mutually exclusive" in result.output


def test_format_error_category(runner, workspace, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("ACGT\nACGX\n")
    result = runner.invoke(main, [
        "subtag", "--config", str(workspace["config_path"]),
        "--output-dir", str(tmp_path / "out"), "--clusters", str(bad),
    ])
    assert result.exit_code != 0
    assert "format error:" in result.output


def test_invalid_input_category(runner, workspace, tmp_path):
    result = runner.invoke(main, [
        "subtag", "--config", str(workspace["config_path"]),
        "--output-dir", str(tmp_path / "out"), "--dims", "500",
    ])
    assert result.exit_code != 0
    assert "invalid input:" in result.output


def test_file_error_category(runner, workspace, tmp_path):
    # evaluate's default model path does not exist in a fresh directory
    result = runner.invoke(main, [
        "evaluate", "--config", str(workspace["config_path"]),
        "--output-dir", str(tmp_path / "fresh"),
    ])
    assert result.exit_code != 0
    assert "file error:" in result.output


def test_missing_config_file_is_a_usage_error(runner, tmp_path):
    result = runner.invoke(main, ["subtag", "--config", str(tmp_path / "nope.json")])
    assert result.exit_code == 2
