"""Scenario configuration loading.

This module loads scenario definitions from JSON files or from the scenarios bundled
with the package, and formats validation errors for the command line.
"""

import json
from importlib import resources
from pathlib import Path
from typing import Any

from pydantic import ValidationError
from survey_assist_utils.logging import get_logger

from models.scenario import ScenarioConfig

logger = get_logger(__name__, level="INFO")

BUNDLED_PACKAGE = "rf_canceller_sim"
BUNDLED_DIR = "scenarios"


def _read_json(file_path: Path) -> dict[str, Any]:
    if not file_path.exists():
        raise FileNotFoundError(f"Scenario file not found: {file_path}")
    try:
        with file_path.open(encoding="utf-8") as file:
            data = json.load(file)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in {file_path}") from e
    if not isinstance(data, dict):
        raise ValueError(f"Scenario file {file_path} must contain a JSON object")
    return data


def load_scenario_config(file_path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario definition from JSON.

    Args:
        file_path: Path to the scenario JSON file.

    Returns:
        ScenarioConfig: The validated scenario.

    Raises:
        FileNotFoundError - if the JSON file cannot be found.
        ValueError - if the file contains invalid JSON.
        pydantic.ValidationError - if the content does not match the schema.
    """
    file_path = Path(file_path)
    config = ScenarioConfig.model_validate(_read_json(file_path))
    logger.debug(f"Loaded scenario {config.name} from {file_path}")
    return config


def bundled_scenario_paths() -> dict[str, Path]:
    """Return the bundled scenario files keyed by scenario name (file stem)."""
    root = resources.files(BUNDLED_PACKAGE) / BUNDLED_DIR
    return {
        Path(entry.name).stem: Path(str(entry))
        for entry in sorted(root.iterdir(), key=lambda e: e.name)
        if entry.name.endswith(".json")
    }


def list_scenarios() -> list[tuple[str, str]]:
    """Return (name, description) for every bundled scenario, sorted by name."""
    return [
        (name, load_scenario_config(path).description)
        for name, path in bundled_scenario_paths().items()
    ]


def load_bundled_scenario(name: str) -> ScenarioConfig:
    """Load a bundled scenario by name.

    Raises:
        KeyError: If no bundled scenario has this name.
    """
    paths = bundled_scenario_paths()
    if name not in paths:
        raise KeyError(f"unknown scenario '{name}', available: {', '.join(paths)}")
    return load_scenario_config(paths[name])


def resolve_scenario(reference: str | Path) -> ScenarioConfig:
    """Load a scenario from a file path, falling back to a bundled name."""
    path = Path(reference)
    if path.suffix == ".json" or path.exists():
        return load_scenario_config(path)
    return load_bundled_scenario(str(reference))


def format_validation_error(error: ValidationError) -> str:
    """One line per failing field, e.g. ``sample_rate_hz: Field required``."""
    lines = []
    for detail in error.errors():
        location = ".".join(str(part) for part in detail["loc"]) or "<root>"
        lines.append(f"{location}: {detail['msg']}")
    return "\n".join(lines)
