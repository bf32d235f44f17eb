"""Configuration management utilities for struct-recovery.

Defaults live in ``const.py``; a user file at ``~/.struct-recovery/config.json``
overrides them and explicit CLI flags override both.
"""

import json
import logging
import os
from copy import deepcopy
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

from ..const import (
    DEFAULT_GAIN_BUDGET,
    DEFAULT_GAIN_MARGIN,
    DEFAULT_HORIZON,
    DEFAULT_NOISE,
    DEFAULT_RHO,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
)

logger = logging.getLogger(__name__)


@dataclass
class ToolkitConfig:
    """Knobs shared by every subcommand."""

    seed: int = DEFAULT_SEED
    rho: float = DEFAULT_RHO
    noise: float = DEFAULT_NOISE
    trials: int = DEFAULT_TRIALS
    horizon: int = DEFAULT_HORIZON
    orientation: str = "transposed"
    gain_margin: float = DEFAULT_GAIN_MARGIN
    gain_budget: int = DEFAULT_GAIN_BUDGET
    log_level: str = "INFO"
    workers: int = 1

    def merged(self, **overrides: Any) -> "ToolkitConfig":
        """Return a copy with every non-None override applied."""
        data = asdict(self)
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in data:
                raise KeyError(f"unknown config key: {key}")
            data[key] = value
        return ToolkitConfig(**data)


class ConfigParseError(Exception):
    """Configuration parsing error."""

    def __init__(self, message: str, file_path: str, default_config: Any):
        super().__init__(message)
        self.file_path = file_path
        self.default_config = default_config


class ConfigManager:
    """Configuration manager for struct-recovery."""

    def __init__(self, config_dir: Optional[Path] = None):
        """Initialize configuration manager.

        Args:
            config_dir: Directory for configuration files. Defaults to ~/.struct-recovery
        """
        if config_dir is None:
            config_dir = Path.home() / ".struct-recovery"

        self.config_dir = Path(config_dir)
        self.config_file = self.config_dir / "config.json"

        # In-memory config used under pytest
        self._test_config: Optional[ToolkitConfig] = None

    def _is_test_env(self) -> bool:
        return (
            os.getenv("STRUCT_RECOVERY_ENV") == "test"
            or os.getenv("PYTEST_CURRENT_TEST") is not None
        )

    def _safe_parse_json(self, content: str) -> Any:
        try:
            return json.loads(content)
        except json.JSONDecodeError as e:
            logger.error(f"JSON parse error: {e}")
            return None

    def _save_config(self, config: ToolkitConfig) -> None:
        config_dict = asdict(config)
        default_dict = asdict(ToolkitConfig())

        # Only keys that differ from the defaults are written
        filtered: Dict[str, Any] = {
            key: value
            for key, value in config_dict.items()
            if json.dumps(value) != json.dumps(default_dict.get(key))
        }

        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, "w", encoding="utf-8") as f:
                json.dump(filtered, f, indent=2, ensure_ascii=False)
        except (PermissionError, OSError) as e:
            logger.warning(f"Could not save config to {self.config_file}: {e}")

    def load(self, throw_on_invalid: bool = False) -> ToolkitConfig:
        """Load the config file merged over the defaults."""
        default_config = ToolkitConfig()
        file_path = self.config_file
        logger.debug(f"Loading config from {file_path}")

        if not file_path.exists():
            logger.debug(f"Config file {file_path} does not exist, using defaults")
            return deepcopy(default_config)

        try:
            content = file_path.read_text(encoding="utf-8")
        except OSError as e:
            if throw_on_invalid:
                raise ConfigParseError(str(e), str(file_path), default_config)
            logger.warning(f"Error loading config from {file_path}: {e}, using defaults")
            return deepcopy(default_config)

        parsed = self._safe_parse_json(content)
        if not isinstance(parsed, dict):
            if throw_on_invalid:
                raise ConfigParseError(
                    f"Invalid JSON in {file_path}", str(file_path), default_config
                )
            logger.warning(f"Invalid JSON in {file_path}, using defaults")
            return deepcopy(default_config)

        known = {f.name for f in fields(ToolkitConfig)}
        unknown = sorted(set(parsed) - known)
        if unknown:
            logger.warning(f"Ignoring unknown config keys in {file_path}: {unknown}")
        merged = {**asdict(default_config), **{k: v for k, v in parsed.items() if k in known}}
        return ToolkitConfig(**merged)

    def get_config(self) -> ToolkitConfig:
        if self._is_test_env() and self._test_config is not None:
            return self._test_config
        return self.load()

    def save_config(self, config: ToolkitConfig) -> None:
        if self._is_test_env():
            self._test_config = config
            return
        self._save_config(config)


config_manager = ConfigManager()


def get_config() -> ToolkitConfig:
    """Get the effective configuration (file merged over defaults)."""
    return config_manager.get_config()


def save_config(config: ToolkitConfig) -> None:
    """Persist the non-default keys of ``config``."""
    config_manager.save_config(config)
