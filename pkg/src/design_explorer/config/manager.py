"""Configuration management."""

import copy
import json
import os
from pathlib import Path
from typing import Any

from loguru import logger

from ..errors import ConfigError
from .schema import RunConfigFile

DEFAULT_CONFIG_FILE = Path(__file__).parent.parent / "assets" / "default-config.json"
OUTPUT_DIR_ENV = "DESIGN_EXPLORER_OUTPUT_DIR"


def get_default_config() -> dict[str, Any]:
    """Load the packaged default configuration as a plain mapping."""
    with DEFAULT_CONFIG_FILE.open("r", encoding="utf-8") as f:
        return json.load(f)


def parse_override(item: str) -> tuple[str, Any]:
    """Split a ``key=value`` override.

    The value is parsed as JSON when possible (numbers, booleans, null, lists,
    objects) and kept as a plain string otherwise.

    Raises
    ------
    ConfigError
        If the item has no ``=`` or an empty key.
    """
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def set_dotted(config: dict[str, Any], key: str, value: Any) -> None:
    """Set a configuration value addressed by a dotted key."""
    keys = key.split(".")
    node = config
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            node[k] = {}
        node = node[k]
    node[keys[-1]] = value


def _deep_update(base_dict: dict[str, Any], update_dict: dict[str, Any]) -> None:
    """Deep update dictionary."""
    for key, value in update_dict.items():
        if (
            isinstance(value, dict)
            and key in base_dict
            and isinstance(base_dict[key], dict)
        ):
            _deep_update(base_dict[key], value)
        else:
            base_dict[key] = value


def read_config_file(config_path: str | Path) -> dict[str, Any]:
    """Read a JSON config file, reporting syntax errors with their line number."""
    path = Path(config_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror or e}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object", line=1)
    return data


def build_config(
    user_data: dict[str, Any], overrides: list[str] | None = None
) -> RunConfigFile:
    """Merge user values and overrides over the packaged defaults and validate.

    Unknown keys are rejected. When neither the user data nor the overrides set
    ``output_dir``, the ``DESIGN_EXPLORER_OUTPUT_DIR`` environment variable
    replaces the packaged default.

    Returns
    -------
    config : RunConfigFile
        Validated run configuration.
    """
    defaults = get_default_config()
    unknown = sorted(set(user_data) - set(defaults))
    if unknown:
        raise ConfigError("unknown key", field=unknown[0])

    config_data = copy.deepcopy(defaults)
    _deep_update(config_data, copy.deepcopy(user_data))

    output_dir_set = "output_dir" in user_data
    for item in overrides or []:
        key, value = parse_override(item)
        if key.split(".")[0] not in defaults:
            raise ConfigError("unknown key", field=key)
        set_dotted(config_data, key, value)
        output_dir_set = output_dir_set or key == "output_dir"

    env_output_dir = os.getenv(OUTPUT_DIR_ENV)
    if env_output_dir and not output_dir_set:
        config_data["output_dir"] = env_output_dir

    return RunConfigFile.from_dict(config_data)


def load_config(
    config_path: str | Path, overrides: list[str] | None = None
) -> RunConfigFile:
    """Load a run configuration file.

    Parameters
    ----------
    config_path : str | Path
        Path to a JSON config file.
    overrides : list[str] | None, default=None
        ``key=value`` items applied after the file, dotted keys allowed.

    Raises
    ------
    ConfigError
        On unreadable files, JSON syntax errors, unknown keys or invalid values.
    """
    config = build_config(read_config_file(config_path), overrides)
    logger.info(f"Configuration loaded from {config_path}")
    return config


def save_config(config: RunConfigFile, config_path: str | Path) -> None:
    """Save configuration to file.

    Notes
    -----
    The configuration is saved in JSON format with indentation for readability.
    Existing configuration files will be overwritten.
    """
    path = Path(config_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(config.to_dict(), f, indent=2)
        f.write("\n")
    logger.info(f"Configuration saved to {path}")
