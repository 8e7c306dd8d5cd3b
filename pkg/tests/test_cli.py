"""Command-line interface: subcommands, exit codes, report schema."""

import json
import subprocess
import sys
from importlib import resources

import pytest

jsonschema = pytest.importorskip("jsonschema")

MONO_SPEC = "target y\nbox x in [-2, 2]\nd1 x >= 0\n"


def run(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "shapeguard.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture(scope="module")
def schema():
    text = resources.files("shapeguard.resources").joinpath("report.schema.json").read_text()
    return json.loads(text)


@pytest.fixture(scope="module")
def eq1_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("spec") / "eq1.spec"
    path.write_text(resources.files("shapeguard.resources").joinpath("eq1.spec").read_text())
    return path


def check_report(path, schema, subcommand):
    report = json.loads(path.read_text())
    jsonschema.validate(report, schema)
    assert report["subcommand"] == subcommand
    return report


def test_synth_single_and_corpus(tmp_path, schema):
    out = tmp_path / "cubic.csv"
    rep = tmp_path / "synth.json"
    proc = run("synth", "--kind", "cubic_fig1", "--seed", "5", "--out", str(out), "--report", str(rep))
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
    report = check_report(rep, schema, "synth")
    assert report["result"]["rows"] == 40

    corpus_dir = tmp_path / "corpus"
    proc = run(
        "synth", "--kind", "corpus", "--seed", "0", "--out", str(corpus_dir),
        "--n-valid", "2", "--n-invalid", "3",
    )
    assert proc.returncode == 0, proc.stderr
    manifest = json.loads((corpus_dir / "manifest.json").read_text())
    assert len(manifest) == 5
    labels = [d["label"] for d in manifest]
    assert labels.count("valid") == 2 and labels.count("invalid") == 3
    for entry in manifest:
        assert (corpus_dir / entry["file"]).exists()


def test_fit_certify_round_trip(tmp_path, schema):
    cubic = tmp_path / "cubic.csv"
    run("synth", "--kind", "cubic_fig1", "--seed", "5", "--out", str(cubic))
    spec = tmp_path / "mono.spec"
    spec.write_text(MONO_SPEC)
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"degree": 3}')
    model = tmp_path / "model.json"
    rep = tmp_path / "fit.json"

    proc = run(
        "fit", "--algo", "scpr", "--data", str(cubic), "--target", "y",
        "--constraints", str(spec), "--config", str(cfg),
        "--model-out", str(model), "--out", str(rep),
    )
    assert proc.returncode == 0, proc.stderr
    report = check_report(rep, schema, "fit")
    assert report["result"]["algorithm"] == "scpr"
    assert report["result"]["fit_report"]["train_rmse"] > 0

    cert_rep = tmp_path / "cert.json"
    proc = run("certify", "--model", str(model), "--constraints", str(spec), "--out", str(cert_rep))
    assert proc.returncode == 0, proc.stderr
    report = check_report(cert_rep, schema, "certify")
    assert report["result"]["all_certified"] is True
    assert "CERTIFIED" in proc.stdout


def test_validate_exit_codes(tmp_path, schema, eq1_path):
    good = tmp_path / "good.csv"
    run("synth", "--kind", "friction_valid", "--seed", "7", "--out", str(good))
    rep = tmp_path / "val.json"
    proc = run(
        "validate", "--data", str(good), "--constraints", str(eq1_path),
        "--algo", "scpr", "--t", "0.05", "--controlled", "p,v", "--out", str(rep),
    )
    assert proc.returncode == 0, proc.stderr
    report = check_report(rep, schema, "validate")
    assert report["result"]["verdict"] == "valid"

    bad = tmp_path / "bad.csv"
    run("synth", "--kind", "friction_stuck", "--seed", "3", "--out", str(bad))
    proc = run(
        "validate", "--data", str(bad), "--constraints", str(eq1_path),
        "--algo", "scpr", "--t", "0.05", "--controlled", "p,v",
    )
    assert proc.returncode == 3, proc.stderr


def test_gridsearch_and_roc(tmp_path, schema, eq1_path):
    corpus_dir = tmp_path / "corpus"
    run(
        "synth", "--kind", "corpus", "--seed", "0", "--out", str(corpus_dir),
        "--n-valid", "2", "--n-invalid", "2",
    )
    grid_csv = tmp_path / "grid.csv"
    grid_rep = tmp_path / "grid.json"
    proc = run(
        "gridsearch", "--data-dir", str(corpus_dir), "--algo", "pr",
        "--folds", "2", "--csv-out", str(grid_csv), "--out", str(grid_rep),
    )
    assert proc.returncode == 0, proc.stderr
    report = check_report(grid_rep, schema, "gridsearch")
    assert "degree" in report["result"]["best_params"]
    header = grid_csv.read_text().splitlines()[0]
    assert "sum_test_rmse" in header

    roc_csv = tmp_path / "roc.csv"
    roc_rep = tmp_path / "roc.json"
    proc = run(
        "roc", "--data-dir", str(corpus_dir), "--algo", "pr",
        "--constraints", str(eq1_path), "--controlled", "p,v",
        "--csv-out", str(roc_csv), "--out", str(roc_rep),
    )
    assert proc.returncode == 0, proc.stderr
    report = check_report(roc_rep, schema, "roc")
    assert 0.0 <= report["result"]["auc"] <= 1.0
    assert roc_csv.read_text().startswith("threshold,fpr,tpr")


def test_error_exit_codes(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("x,y\n")
    proc = run("fit", "--algo", "scpr", "--data", str(empty), "--target", "y")
    assert proc.returncode == 1
    assert "SchemaError" in proc.stderr

    proc = run("fit", "--algo", "nope", "--data", str(empty))
    assert proc.returncode == 2

    proc = run("frobnicate")
    assert proc.returncode == 2
