"""
Command-line tests

End-to-end runs of every command through the Typer app
"""
import csv
import json
import math
from pathlib import Path
from typing import List

import pytest
from typer.testing import CliRunner

from utils.app_factory import create_app

runner = CliRunner()
app = create_app()


def _invoke(args: List[str]):
    return runner.invoke(app, ["--log-level", "WARNING", *args])


def _gen(path: Path, n: int, *extra: str) -> Path:
    result = _invoke(["gen", "--out", str(path), "--n", str(n), *extra])
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def blobs(tmp_path: Path):
    train = _gen(tmp_path / "train.csv", 60, "--p", "3", "--classes", "3", "--seed", "1")
    test = _gen(tmp_path / "test.csv", 8, "--p", "3", "--classes", "3", "--seed", "2")
    return train, test


def _predict(train: Path, test: Path, *extra: str) -> dict:
    result = _invoke(["predict", "--train", str(train), "--test", str(test), *extra])
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_gen_writes_header_and_rows(tmp_path: Path):
    """Test 1000 rows plus the header, byte-identical across runs"""
    first = _gen(tmp_path / "a.csv", 1000, "--seed", "3")
    second = _gen(tmp_path / "b.csv", 1000, "--seed", "3")
    lines = first.read_text().splitlines()
    assert len(lines) == 1001
    assert lines[0].split(",")[0] == "f1" and lines[0].endswith(",label")
    assert first.read_bytes() == second.read_bytes()


def test_gen_rejects_empty_dataset(tmp_path: Path):
    result = _invoke(["gen", "--out", str(tmp_path / "x.csv"), "--n", "0"])
    assert result.exit_code != 0
    assert not (tmp_path / "x.csv").exists()


def test_predict_standard_equals_optimized(blobs):
    """Both variants print the same p-values and sets"""
    train, test = blobs
    standard = _predict(train, test, "--measure", "knn", "--k", "3", "--variant", "standard")
    optimized = _predict(train, test, "--measure", "knn", "--k", "3", "--variant", "optimized")
    assert standard["rows"] == optimized["rows"]
    assert standard["variant"] == "standard" and optimized["variant"] == "optimized"
    assert len(optimized["rows"]) == 8
    assert set(optimized["rows"][0]["p_values"]) == {"0", "1", "2"}


def test_predict_epsilon_one_gives_empty_sets(blobs):
    train, test = blobs
    report = _predict(train, test, "--measure", "nn", "--epsilon", "1")
    assert all(row["prediction_set"] == [] for row in report["rows"])


def test_predict_icp_and_workers(blobs, tmp_path: Path):
    train, test = blobs
    icp = _predict(train, test, "--measure", "kde", "--variant", "icp", "--t", "30")
    assert icp["variant"] == "icp"
    serial = _predict(train, test, "--measure", "knn", "--k", "3")
    threaded = _predict(train, test, "--measure", "knn", "--k", "3", "--workers", "3")
    assert serial["rows"] == threaded["rows"]


def test_predict_writes_report_file(blobs, tmp_path: Path):
    train, test = blobs
    out = tmp_path / "pred.json"
    result = _invoke(["predict", "--train", str(train), "--test", str(test), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text())["schema_version"] == 1


def test_predict_regression_intervals_are_sorted(tmp_path: Path):
    train = _gen(tmp_path / "train.csv", 50, "--task", "regression", "--p", "1", "--seed", "4")
    test = _gen(tmp_path / "test.csv", 5, "--task", "regression", "--p", "1", "--seed", "5")
    report = _predict(train, test, "--task", "regression", "--k", "3", "--epsilon", "0.2", "--check-grid")
    assert report["task"] == "regression"
    for row in report["rows"]:
        ends = [float(v) for interval in row["intervals"] for v in interval]
        assert ends == sorted(ends)
        assert all(not math.isnan(v) for v in ends)
        assert isinstance(row["grid_agrees"], bool)


def test_predict_bad_task(blobs):
    train, test = blobs
    result = _invoke(["predict", "--train", str(train), "--test", str(test), "--task", "ranking"])
    assert result.exit_code == 2


def test_predict_missing_file(tmp_path: Path):
    result = _invoke(["predict", "--train", str(tmp_path / "nope.csv"), "--test", str(tmp_path / "nope.csv")])
    assert result.exit_code == 2


def test_predict_dimension_mismatch(blobs, tmp_path: Path):
    train, _ = blobs
    other = _gen(tmp_path / "other.csv", 5, "--p", "2")
    result = _invoke(["predict", "--train", str(train), "--test", str(other)])
    assert result.exit_code == 65


def test_predict_lssvm_needs_two_labels(blobs):
    train, test = blobs
    result = _invoke(["predict", "--train", str(train), "--test", str(test), "--measure", "lssvm"])
    assert result.exit_code == 1


def test_validate_writes_coverage_report(tmp_path: Path):
    out = tmp_path / "coverage.json"
    result = _invoke([
        "validate", "--n", "50", "--test-points", "40", "--p", "3", "--k", "3",
        "--epsilon", "0.1", "--epsilon", "0.2", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert [row["epsilon"] for row in report["rows"]] == [0.1, 0.2]
    assert all(row["trials"] == 40 for row in report["rows"])
    assert report["training_sets"] == 20


def test_fuzziness_writes_report(tmp_path: Path):
    out = tmp_path / "fuzziness.json"
    result = _invoke([
        "fuzziness", "--measure", "knn", "--n", "40", "--test-points", "30", "--classes", "3",
        "--p", "3", "--k", "3", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    row = json.loads(out.read_text())["rows"][0]
    assert row["measure"] == "knn"
    assert 0.0 <= row["welch"]["p_value"] <= 1.0


def test_bench_writes_one_row_per_cell(tmp_path: Path):
    out = tmp_path / "bench.csv"
    result = _invoke([
        "bench", "--measure", "knn", "--variant", "standard", "--variant", "optimized",
        "--n", "10", "--n", "20", "--test-points", "2", "--seeds", "2", "--p", "3", "--k", "3",
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    with out.open(newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 8
    assert {row["variant"] for row in rows} == {"standard", "optimized"}
    assert "log-log slopes" in result.stdout


def test_config_file_sets_report_dir(tmp_path: Path):
    config = tmp_path / "engine.env"
    config.write_text(f"REPORT_DIR={tmp_path / 'reports'}\nDEFAULT_K=3\nFEATURE_DIM=3\n")
    result = runner.invoke(app, [
        "--config", str(config), "--log-level", "WARNING",
        "validate", "--n", "30", "--test-points", "20", "--epsilon", "0.1",
    ])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "reports" / "coverage.json").exists()


def test_bad_log_level():
    result = runner.invoke(app, ["--log-level", "LOUD", "gen", "--out", "x.csv", "--n", "5"])
    assert result.exit_code == 2
