"""Shared pytest fixtures."""

from pathlib import Path

import pytest
import yaml

from mlbgg.core.models import Layer0Config, Layer1NetworkConfig
from mlbgg.core.scenario import Scenario
from tests.fixtures.scenarios import scenario_dict, small_layer0, small_network, small_scenario


@pytest.fixture
def network() -> Layer1NetworkConfig:
    return small_network()


@pytest.fixture
def layer0_cfg() -> Layer0Config:
    return small_layer0()


@pytest.fixture
def scenario() -> Scenario:
    return small_scenario()


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """Small scenario written as YAML, with few trials for CLI runs."""
    path = tmp_path / "scenario.yaml"
    document = scenario_dict(n_trials=60)
    document["output"] = {"directory": str(tmp_path / "results")}
    path.write_text(yaml.safe_dump(document), encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in ("MLBGG_SEED", "MLBGG_WORKERS", "MLBGG_OUTPUT_DIR", "MLBGG_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
