"""
Configuration management for gwp

Handles environment variables and defaults.
"""

import os
from pathlib import Path
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError


LOG_LEVELS = ("off", "errors", "metrics", "debug", "full")


def get_cache_dir() -> Path:
    """Get cache directory, respecting XDG_CACHE_HOME"""
    cache_home = os.environ.get("XDG_CACHE_HOME", str(Path.home() / ".cache"))
    return Path(cache_home) / "gwp"


def parse_int(text: str, name: str = "value") -> int:
    """Parse a decimal integer that may contain '_' separators"""
    cleaned = text.strip()
    digits = cleaned.lstrip("+-").replace("_", "")
    if not digits.isdigit() or cleaned.startswith("_") or cleaned.endswith("_") or "__" in cleaned:
        raise ConfigError(f"{name}: not a decimal integer: {text!r}")
    return int(cleaned.replace("_", ""))


def _env_int(var: str, default: int) -> int:
    raw = os.environ.get(var)
    if raw is None or raw == "":
        return default
    return parse_int(raw, var)


@dataclass
class Config:
    """gwp configuration"""

    # Guards
    expand_limit: int
    support_limit: int
    level_bound: int
    brute_force_inputs: int

    # Run log
    metrics_db_path: Path
    log_level: str  # off, errors, metrics, debug, full

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables"""
        cache_dir = get_cache_dir()

        log_level = os.environ.get("GWP_LOG_LEVEL", "metrics").lower()
        if log_level not in LOG_LEVELS:
            raise ConfigError(
                f"GWP_LOG_LEVEL: expected one of {', '.join(LOG_LEVELS)}, got {log_level!r}"
            )

        return cls(
            expand_limit=_env_int("GWP_EXPAND_LIMIT", 100_000_000),
            support_limit=_env_int("GWP_SUPPORT_LIMIT", 2_000_000),
            level_bound=_env_int("GWP_LEVEL_BOUND", 8),
            brute_force_inputs=_env_int("GWP_BRUTE_FORCE_INPUTS", 20),
            metrics_db_path=Path(os.environ.get(
                "GWP_METRICS_DB",
                str(cache_dir / "metrics.sqlite")
            )),
            log_level=log_level,
        )


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get or create the global config instance"""
    global _config
    if _config is None:
        _config = Config.from_env()
    return _config


def reset_config():
    """Forget the cached config so the next get_config() rereads the environment"""
    global _config
    _config = None
