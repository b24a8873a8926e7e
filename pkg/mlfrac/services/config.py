"""Run configuration: defaults < config file < MLFRAC_* environment < flags."""
import json
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from mlfrac import __version__
from mlfrac.models import RunConfig
from mlfrac.services.errors import ConfigError


ENV_PREFIX = "MLFRAC_"


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a flat JSON object of RunConfig keys.

    Raises:
        OSError: file cannot be read
        ConfigError: content is not a flat JSON object
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object of key/value pairs")
    nested = [key for key, value in data.items() if isinstance(value, (dict, list))]
    if nested:
        raise ConfigError(f"{path}: nested values not allowed for {', '.join(sorted(nested))}")
    return data


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
    """MLFRAC_<FIELD> variables for the RunConfig fields; pydantic coerces the strings."""
    environ = os.environ if environ is None else environ
    overrides = {}
    for field in RunConfig.model_fields:
        value = environ.get(ENV_PREFIX + field.upper())
        if value is not None:
            overrides[field] = value
    return overrides


def build_config(
    config_path: Optional[str] = None,
    flag_overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """
    Merge every configuration layer into a validated RunConfig.

    Flags whose value is None are treated as not given.

    Raises:
        pydantic.ValidationError: unknown key or out-of-range value
    """
    merged: Dict[str, Any] = {}
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update(env_overrides(environ))
    if flag_overrides:
        merged.update({k: v for k, v in flag_overrides.items() if v is not None})
    return RunConfig(**merged)


def provenance(config: RunConfig, **extra: Any) -> Dict[str, Any]:
    """Header fields written ahead of every output."""
    header = {
        "generator": f"mlfrac {__version__}",
        "config_hash": config.digest(),
        "interpretation": config.interpretation.value,
        "tol": config.tol,
        "max_terms": config.max_terms,
        "z_max": config.z_max,
        "z_switch": config.z_switch,
        "extended_precision": config.extended_precision,
    }
    header.update(extra)
    return header
