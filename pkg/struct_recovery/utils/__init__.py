"""Utility helpers: configuration and log sinks."""

from .config import (
    ConfigManager,
    ConfigParseError,
    ToolkitConfig,
    get_config,
    save_config,
)
from .logs import define_log_level, log_directory

__all__ = [
    "ConfigManager",
    "ConfigParseError",
    "ToolkitConfig",
    "define_log_level",
    "get_config",
    "log_directory",
    "save_config",
]
