"""
Experiment configuration files.

A config file is a YAML mapping validated into a Scenario. Every validation
problem is reported with the dotted path of the offending field, e.g.
``layer1.template.lambda_attacker``.
"""

from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Union

import structlog
import yaml
from pydantic import ValidationError

from mlbgg.core.exceptions import MissingConfigError, SchemaError
from mlbgg.core.scenario import Scenario

logger = structlog.get_logger(__name__)

DEFAULT_SCENARIO = "default_scenario.yaml"


def default_config_path() -> Path:
    """Path of the scenario shipped with the package."""
    return Path(str(resources.files("mlbgg.data").joinpath(DEFAULT_SCENARIO)))


def field_errors(error: ValidationError) -> List[Dict[str, str]]:
    """One ``{"field", "message"}`` entry per pydantic error, fields as dotted paths."""
    return [
        {
            "field": ".".join(str(part) for part in e["loc"]) or "<root>",
            "message": e["msg"],
        }
        for e in error.errors()
    ]


def parse_config(document: Any, source: str = "<config>") -> Scenario:
    """
    Validate an already-parsed document.

    Raises:
        SchemaError: If the document is not a mapping or violates the schema
    """
    if not isinstance(document, dict):
        raise SchemaError(
            f"{source}: top level must be a mapping",
            details={"errors": [{"field": "<root>", "message": "expected a mapping"}]},
        )
    try:
        return Scenario.model_validate(document)
    except ValidationError as e:
        errors = field_errors(e)
        summary = "; ".join(f"{err['field']}: {err['message']}" for err in errors)
        raise SchemaError(f"{source}: {summary}", details={"errors": errors}) from e


def load_config(path: Union[str, Path]) -> Scenario:
    """
    Load and validate a scenario file.

    Args:
        path: YAML file

    Returns:
        Validated Scenario

    Raises:
        MissingConfigError: If the file does not exist or cannot be read
        SchemaError: If the YAML is malformed or violates the schema
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise MissingConfigError(
            f"config file not found: {path}", details={"path": str(path)}
        ) from e
    except OSError as e:
        raise MissingConfigError(f"cannot read {path}: {e}", details={"path": str(path)}) from e

    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise SchemaError(
            f"{path}: invalid YAML: {e}",
            details={"errors": [{"field": "<root>", "message": str(e)}]},
        ) from e

    scenario = parse_config(document, str(path))
    logger.debug("config.loaded", path=str(path), scenario=scenario.name)
    return scenario


def dump_config(scenario: Scenario) -> str:
    """Effective configuration as YAML; loading it back gives the same fingerprint."""
    return yaml.safe_dump(
        scenario.model_dump(mode="json", exclude_none=True),
        sort_keys=True,
        default_flow_style=False,
    )
