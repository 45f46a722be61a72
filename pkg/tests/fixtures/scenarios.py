"""Small scenarios that run in well under a second."""

from typing import Any, Dict

from mlbgg.core.models import Layer0Config, Layer1NetworkConfig
from mlbgg.core.scenario import Scenario


def network_dict(**overrides: Any) -> Dict[str, Any]:
    # T = 10, about two captures per epoch on each side
    base = {
        "total_nodes": 20,
        "lambda_attacker": 1.0,
        "lambda_honest": 1.0,
        "spacing": 2.0,
    }
    base.update(overrides)
    return base


def layer0_dict(**overrides: Any) -> Dict[str, Any]:
    # T = ceil(11 / 2) = 6
    base = {
        "eta": 11,
        "lambda_corrupted": 1.0,
        "lambda_genuine": 1.0,
        "spacing": 1.0,
        "alpha": 0.2,
    }
    base.update(overrides)
    return base


def scenario_dict(**overrides: Any) -> Dict[str, Any]:
    base: Dict[str, Any] = {
        "name": "small",
        "layer1": {"eta": 3, "template": network_dict()},
        "layer0": layer0_dict(),
        "costs": {
            "network_value": 100.0,
            "layer0_value": 100.0,
            "backup_unit_cost": 1.0,
            "alliance_unit_cost": 10.0,
        },
        "n_trials": 200,
        "seed": 7,
        "sweep": {
            "backup_range": [0, 10],
            "alpha_grid": [0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0],
            "eta_grid": [5, 11],
        },
    }
    base.update(overrides)
    return base


def small_network(**overrides: Any) -> Layer1NetworkConfig:
    return Layer1NetworkConfig(**network_dict(**overrides))


def small_layer0(**overrides: Any) -> Layer0Config:
    return Layer0Config(**layer0_dict(**overrides))


def small_scenario(**overrides: Any) -> Scenario:
    return Scenario.model_validate(scenario_dict(**overrides))
