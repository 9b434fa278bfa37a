"""Tests for configuration loading and logging setup."""

import json

import pytest
from loguru import logger
from pydantic import ValidationError

from pfrkit.core.config import (
    Config,
    ConfigManager,
    FittingConfig,
    LoggingConfig,
    MonteCarloConfig,
    setup_logging,
)


@pytest.fixture(autouse=True)
def _isolated_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("PFRKIT_CONFIG", raising=False)
    monkeypatch.delenv("PFRKIT_LOG_LEVEL", raising=False)


def test_defaults():
    cfg = Config()
    assert cfg.enumeration.limit == 10_000_000
    assert cfg.monte_carlo.samples == 100_000
    assert cfg.fitting.eps == 1e-3
    assert cfg.minkowski.tol == 1e-6
    assert cfg.gaussian.tail_eps == 1e-10
    assert cfg.transfer.target == "ellipsoid"


@pytest.mark.parametrize("factory", [
    lambda: MonteCarloConfig(samples=0),
    lambda: MonteCarloConfig(seed=-1),
    lambda: FittingConfig(eps=0),
    lambda: Config(transfer={"target": "sphere"}),
])
def test_invalid_values(factory):
    with pytest.raises(ValidationError):
        factory()


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        ConfigManager(tmp_path / "missing.json").load()


def test_default_file_roundtrip(tmp_path):
    path = tmp_path / "config.json"
    ConfigManager.create_default_config(path)
    assert ConfigManager(path).load() == Config()


def test_partial_file_keeps_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"monte_carlo": {"samples": 5000}}))
    cfg = ConfigManager(path).load()
    assert cfg.monte_carlo.samples == 5000
    assert cfg.monte_carlo.block_size == 8192


def test_env_overrides(tmp_path, monkeypatch):
    path = tmp_path / "env.json"
    path.write_text(json.dumps({"monte_carlo": {"seed": 9}}))
    monkeypatch.setenv("PFRKIT_CONFIG", str(path))
    monkeypatch.setenv("PFRKIT_LOG_LEVEL", "debug")
    cfg = ConfigManager().load_or_default()
    assert cfg.monte_carlo.seed == 9
    assert cfg.logging.level == "DEBUG"


def test_get_before_load():
    with pytest.raises(RuntimeError):
        ConfigManager().get()


def test_file_sink_captures_debug(tmp_path):
    log_file = tmp_path / "logs" / "pfr.log"
    setup_logging(LoggingConfig(level="WARNING", file=str(log_file)))
    logger.debug("enumeration finished")
    logger.remove()
    assert "enumeration finished" in log_file.read_text()
