#!/usr/bin/env python3
"""Configuration utilities: file loading, merging and environment overrides."""
from __future__ import annotations
import json
import os
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from lab.errors import ConfigError

NEST_SEPARATOR = '__'


def load_config_file(file_path: Optional[Path]) -> Dict[str, Any]:
    """Load a JSON or YAML (by suffix) config file; a missing path gives {}.

    Raises:
        ConfigError: unreadable file, parse error or a non-mapping document
    """
    if file_path is None:
        return {}
    file_path = Path(file_path)
    if not file_path.exists():
        raise ConfigError(f"config file not found: {file_path}")
    try:
        with open(file_path, 'r') as f:
            if file_path.suffix.lower() in ('.yaml', '.yml'):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except (OSError, json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"could not read config {file_path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {file_path} must contain a mapping, got {type(data).__name__}")
    return data


def save_json_config(file_path: Path, data: Dict[str, Any]) -> Path:
    """Save configuration as indented JSON, creating parent directories."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')
    return file_path


def deep_merge(base: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
    """Deep merge two dictionaries; overlay wins."""
    result = deepcopy(base)

    for key, value in overlay.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = deepcopy(value)

    return result


def merge_configs(
    defaults: Dict[str, Any],
    env_vars: Dict[str, Any],
    file_config: Dict[str, Any],
    cli_args: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """Merge configurations with priority: CLI > env > file > defaults."""
    result = deepcopy(defaults)
    result = deep_merge(result, file_config)
    result = deep_merge(result, env_vars)
    if cli_args:
        result = deep_merge(result, cli_args)
    return result


def get_env_value(key: str, default: Any = None, value_type: type = str) -> Any:
    """Get environment variable with type conversion.

    Args:
        key: Environment variable name
        default: Default value if not set or not convertible
        value_type: Type to convert to (str, int, bool, float)
    """
    value = os.getenv(key)

    if value is None or value.strip() == '':
        return default

    try:
        if value_type == bool:
            return value.lower() in ('true', '1', 'yes', 'on')
        elif value_type == int:
            return int(value)
        elif value_type == float:
            return float(value)
        else:
            return str(value)
    except (ValueError, AttributeError):
        return default


def flatten_nested_dict(nested: Dict[str, Any], prefix: str = '',
                        separator: str = NEST_SEPARATOR) -> Dict[str, Any]:
    """Flatten nested dictionary to single level with prefixed keys.

    Example:
        {'tolerances': {'xi_relative': 1e-3}} becomes {'tolerances__xi_relative': 1e-3}
    """
    result = {}

    for key, value in nested.items():
        new_key = f"{prefix}{separator}{key}" if prefix else key

        if isinstance(value, dict):
            result.update(flatten_nested_dict(value, new_key, separator))
        else:
            result[new_key] = value

    return result


def unflatten_dict(flat: Dict[str, Any], separator: str = NEST_SEPARATOR) -> Dict[str, Any]:
    """Convert a flattened dictionary back to nested structure."""
    result: Dict[str, Any] = {}

    for key, value in flat.items():
        parts = key.split(separator)
        current = result

        for part in parts[:-1]:
            current = current.setdefault(part, {})

        current[parts[-1]] = value

    return result


def parse_env_scalar(raw: str) -> Any:
    """Interpret an environment string as YAML so numbers and lists keep their type."""
    try:
        return yaml.safe_load(raw)
    except yaml.YAMLError:
        return raw


def load_env_config(env_prefix: str, defaults: Dict[str, Any]) -> Dict[str, Any]:
    """Load configuration from environment variables with a prefix.

    Args:
        env_prefix: Environment variable prefix (e.g., 'EIKONAL_LAB_')
        defaults: Default configuration structure (nested dict)

    Returns:
        Nested dict holding only the keys set in the environment
    """
    flat_defaults = flatten_nested_dict(defaults)

    env_config = {}
    for flat_key in flat_defaults.keys():
        env_key = f"{env_prefix}{flat_key}".upper()
        env_value = os.getenv(env_key)

        if env_value is not None:
            env_config[flat_key] = parse_env_scalar(env_value)

    return unflatten_dict(env_config)
