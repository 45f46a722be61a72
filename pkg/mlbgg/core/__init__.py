"""Core domain models, configuration, estimators and the exception hierarchy."""

from mlbgg.core.config import RuntimeSettings, load_settings
from mlbgg.core.exceptions import (
    ConfigurationError,
    MLBGGError,
    ParameterError,
    SchemaError,
    SelfTestFailure,
)
from mlbgg.core.models import (
    ExitOutcome,
    GamePath,
    Layer0Config,
    Layer1NetworkConfig,
    ObservationSchedule,
    R1Variant,
    Strategy,
    Threshold,
    ThresholdRule,
    Winner,
)

__all__ = [
    "RuntimeSettings",
    "load_settings",
    "ConfigurationError",
    "MLBGGError",
    "ParameterError",
    "SchemaError",
    "SelfTestFailure",
    "ExitOutcome",
    "GamePath",
    "Layer0Config",
    "Layer1NetworkConfig",
    "ObservationSchedule",
    "R1Variant",
    "Strategy",
    "Threshold",
    "ThresholdRule",
    "Winner",
]
