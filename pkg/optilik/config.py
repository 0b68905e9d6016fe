"""
Process configuration for optilik.

Values are read once from the environment; the module-level ``config``
instance is what the rest of the package consults.
"""

import logging
import os


class Config:
    """Configuration read from ``OPTILIK_*`` environment variables."""

    def __init__(self):
        self.threads: int = self._get_int_env("OPTILIK_THREADS", os.cpu_count() or 1)
        self.log_level: str = os.environ.get("OPTILIK_LOG_LEVEL", "WARNING").upper()

    def _get_int_env(self, env_var: str, default: int) -> int:
        """Get an integer from environment variable with default."""
        raw = os.environ.get(env_var)
        if raw is None or not raw.strip():
            return default
        try:
            return int(raw)
        except ValueError:
            logging.getLogger(__name__).warning(
                "Ignoring %s=%r, expected an integer", env_var, raw
            )
            return default

    @property
    def log_level_value(self) -> int:
        """Numeric log level, WARNING when the name is unknown."""
        value = logging.getLevelName(self.log_level)
        return value if isinstance(value, int) else logging.WARNING

    def validate(self) -> bool:
        """Validate configuration values."""
        if self.threads < 1:
            return False
        if not isinstance(logging.getLevelName(self.log_level), int):
            return False
        return True

    def worker_count(self, tasks: int) -> int:
        """Number of workers to use for ``tasks`` independent jobs."""
        return max(1, min(self.threads, tasks))

    def to_dict(self) -> dict:
        """Convert configuration to dictionary."""
        return {
            "threads": self.threads,
            "log_level": self.log_level,
        }


# Global configuration instance
config = Config()
