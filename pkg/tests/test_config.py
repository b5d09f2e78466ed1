"""
Configuration, schema and report helper tests
"""
import json
import logging
from pathlib import Path

import pytest
from pydantic import ValidationError

from commands.common import build_run_config
from common.schemas.bench import RunConfig, log_grid
from config import load_settings
from utils.logging_config import JSONFormatter
from utils.reports import report_path


def test_load_settings_from_file(tmp_path: Path):
    """Test key=value file values and explicit overrides"""
    config = tmp_path / "engine.env"
    config.write_text("DEFAULT_K=7\nBENCH_TIMEOUT_SECONDS=5\n# comment\nLOG_LEVEL=debug\n")
    cfg = load_settings(config, BENCH_TIMEOUT_SECONDS=9)
    assert cfg.DEFAULT_K == 7
    assert cfg.BENCH_TIMEOUT_SECONDS == 9.0
    assert cfg.LOG_LEVEL == "DEBUG"


def test_defaults(test_settings):
    assert test_settings.DEFAULT_K == 15
    assert test_settings.FEATURE_DIM == 30
    assert test_settings.WELCH_ALPHA == 0.01
    assert test_settings.VALIDATION_TEST_POINTS == 2000


@pytest.mark.parametrize("overrides", [{"LOG_LEVEL": "LOUD"}, {"DEFAULT_K": 0}, {"BENCH_N_MIN": 100, "BENCH_N_MAX": 10}])
def test_invalid_settings(overrides):
    with pytest.raises(ValidationError):
        load_settings(**overrides)


def test_log_grid():
    assert log_grid(10, 1000, 3) == [10, 100, 1000]
    assert log_grid(1, 3, 10) == [1, 2, 3]


def test_run_config_grid_must_increase():
    with pytest.raises(ValidationError):
        RunConfig(n_grid=(20, 10))
    with pytest.raises(ValidationError):
        RunConfig(n_grid=())


def test_build_run_config_ignores_missing_overrides(test_settings):
    config = build_run_config(test_settings, k=None, B=3, p=4)
    assert config.k == 15
    assert config.B == 3
    assert config.p == 4
    assert config.train_fraction == 0.5


def test_report_path(tmp_path: Path):
    relative = report_path("sub/bench.csv", tmp_path)
    assert relative == tmp_path / "sub" / "bench.csv"
    assert relative.parent.is_dir()
    absolute = tmp_path / "x.json"
    assert report_path(absolute, tmp_path / "ignored") == absolute


def test_json_formatter_emits_extras():
    record = logging.LogRecord("bench", logging.INFO, __file__, 1, "Cell done", None, None)
    record.measure = "knn"
    record.n = 100
    data = json.loads(JSONFormatter().format(record))
    assert data["message"] == "Cell done"
    assert data["measure"] == "knn"
    assert data["n"] == 100
    assert data["level"] == "INFO"
