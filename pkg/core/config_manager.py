# core/config_manager.py
"""
Persistent settings for the verification toolkit: capacities, the random
seed, sample counts, the default coefficient ring and logging options.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict

LOGGER = logging.getLogger(__name__)

DATA_DIR_ENV = "STEINBERG_DATA_DIR"


def data_directory() -> Path:
    """Directory for config.json and reports.db (created on demand)."""
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir:
        path = Path(data_dir)
    else:
        # development checkout
        path = Path(__file__).parent.parent / "data"
    path.mkdir(parents=True, exist_ok=True)
    return path


class ConfigManager:
    """
    Loads and saves the toolkit settings kept in ``config.json``.
    """

    def __init__(self):
        self.data_dir = data_directory()
        self.config_path = self.data_dir / "config.json"
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """
        Loads saved settings, filling any missing key from the defaults.
        """
        default_config = self._get_default_config()
        if self.config_path.exists():
            try:
                with open(self.config_path, "r", encoding="utf-8") as f:
                    config = json.load(f)
                for key, value in default_config.items():
                    if key not in config:
                        config[key] = value
                return config
            except (OSError, json.JSONDecodeError) as e:
                LOGGER.warning("could not read %s (%s); using defaults", self.config_path, e)
        return default_config

    def _get_default_config(self) -> Dict[str, Any]:
        """Returns the default settings."""
        return {
            "group_capacity": 1_000_000,
            "bar_capacity": 1_000_000,
            "cell_capacity": 250_000,
            "seed": 0,
            "samples": 50,
            "ring": "Z",
            "workers": 1,
            "log_level": "WARNING",
            "progress": True,
        }

    def get(self, key: str, default: Any = None) -> Any:
        return self.config.get(key, default)

    def set(self, key: str, raw: str) -> Any:
        """Parses ``raw`` with the type of the key's default and stores it."""
        defaults = self._get_default_config()
        if key not in defaults:
            raise KeyError(f"unknown setting {key!r}; known: {', '.join(sorted(defaults))}")
        kind = type(defaults[key])
        if kind is bool:
            value: Any = raw.strip().lower() in ("1", "true", "yes", "on")
        elif kind is int:
            value = int(raw.replace("_", ""))
        else:
            value = raw
        self.config[key] = value
        return value

    def save_config(self) -> None:
        """Writes the current settings as indented JSON."""
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            with open(self.config_path, "w", encoding="utf-8") as f:
                json.dump(self.config, f, ensure_ascii=False, indent=4, sort_keys=True)
        except OSError as e:
            LOGGER.error("could not save %s: %s", self.config_path, e)
            raise
