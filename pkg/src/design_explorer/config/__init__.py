"""Run configuration: schema and file handling."""

from .manager import build_config, load_config, parse_override, save_config
from .schema import ExplorerConfig, OutputFormat, RunConfigFile, StoppingRule

__all__ = [
    "ExplorerConfig",
    "OutputFormat",
    "RunConfigFile",
    "StoppingRule",
    "build_config",
    "load_config",
    "parse_override",
    "save_config",
]
