#!/usr/bin/env python3
"""Configuration module for the quadrance e.c. toolkit.

This module handles loading configuration from files and environment.
"""

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional


def _to_bool(value: str) -> bool:
    return value.lower() in ("true", "1", "yes")


class Config:
    """Configuration management for checks, surveys and reports."""

    # Default configuration values
    DEFAULTS: Dict[str, Any] = {
        "materialize_limit": 2**21,
        "bitset_cache_size": 16384,
        "bitset_cache_bytes": 2**26,
        "max_workers": os.cpu_count() or 1,
        "samples": 100_000,
        "seed": 42,
        "survey_exhaustive_limit": 1331,
        "enumeration_budget": 2**20,
        "output_format": "json",
        "report_timing": True,
        "verbose": False,
    }

    def __init__(self, config_file: Optional[str] = None):
        """Initialize configuration.

        Args:
            config_file: Path to JSON config file (optional).
        """
        self._config: Dict[str, Any] = self.DEFAULTS.copy()

        if config_file and Path(config_file).exists():
            self.load_from_file(config_file)

        self.load_from_env()

    def load_from_file(self, config_file: str) -> None:
        """Load configuration from JSON file.

        Args:
            config_file: Path to JSON config file.
        """
        try:
            with open(config_file, "r", encoding="utf-8") as f:
                file_config = json.load(f)
                self._config.update(file_config)
                logging.debug(f"Loaded config from {config_file}")
        except (OSError, ValueError) as e:
            logging.warning(f"Failed to load config from {config_file}: {e}")

    def load_from_env(self) -> None:
        """Load configuration from environment variables prefixed with QEC_."""
        env_mappings: Dict[str, Any] = {
            "QEC_MATERIALIZE_LIMIT": ("materialize_limit", int),
            "QEC_BITSET_CACHE_SIZE": ("bitset_cache_size", int),
            "QEC_BITSET_CACHE_BYTES": ("bitset_cache_bytes", int),
            "QEC_MAX_WORKERS": ("max_workers", int),
            "QEC_SAMPLES": ("samples", int),
            "QEC_SEED": ("seed", int),
            "QEC_SURVEY_EXHAUSTIVE_LIMIT": ("survey_exhaustive_limit", int),
            "QEC_ENUMERATION_BUDGET": ("enumeration_budget", int),
            "QEC_OUTPUT_FORMAT": "output_format",
            "QEC_REPORT_TIMING": ("report_timing", _to_bool),
            "QEC_VERBOSE": ("verbose", _to_bool),
        }

        for env_var, config_key in env_mappings.items():
            if env_var in os.environ:
                value = os.environ[env_var]
                if isinstance(config_key, tuple):
                    key, converter = config_key
                    try:
                        self._config[key] = converter(value)
                    except (ValueError, TypeError) as e:
                        logging.warning(f"Invalid value for {env_var}: {e}")
                else:
                    self._config[config_key] = value

    def get(self, key: str, default: Any = None) -> Any:
        return self._config.get(key, default)

    def set(self, key: str, value: Any) -> None:
        self._config[key] = value

    def to_dict(self) -> Dict[str, Any]:
        return self._config.copy()


# Global config instance
_config: Optional[Config] = None


def get_config(config_file: Optional[str] = None) -> Config:
    """Get global configuration instance.

    Args:
        config_file: Path to config file (only used on first call).

    Returns:
        Config instance.
    """
    global _config
    if _config is None:
        _config = Config(config_file)
    return _config


def reset_config() -> None:
    """Reset global configuration (mainly for testing)."""
    global _config
    _config = None


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one CLI invocation."""

    command: str
    m: Optional[int] = None
    d: Optional[int] = None
    n: Optional[int] = None
    mode: str = "exhaustive"
    samples: int = 100_000
    seed: int = 42
    materialize_limit: int = 2**21
    bitset_cache_size: int = 16384
    bitset_cache_bytes: int = 2**26
    worker_count: int = 1
    output_path: Optional[str] = None
    output_format: str = "json"
    report_timing: bool = True

    def __post_init__(self) -> None:
        if self.m is not None and self.m < 2:
            raise ValueError(f"modulus must be >= 2, got {self.m}")
        if self.d is not None and self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.n is not None and self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.mode not in ("exhaustive", "sample"):
            raise ValueError(f"mode must be 'exhaustive' or 'sample', got {self.mode!r}")
        if self.mode == "sample" and self.samples < 1:
            raise ValueError(f"sample mode needs samples >= 1, got {self.samples}")
        if self.bitset_cache_size < 1 or self.bitset_cache_bytes < 1:
            raise ValueError(f"bitset cache limits must be >= 1, got {self.bitset_cache_size} rows and {self.bitset_cache_bytes} bytes")
        if self.worker_count < 1:
            raise ValueError(f"worker count must be >= 1, got {self.worker_count}")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"output format must be 'json' or 'csv', got {self.output_format!r}")
