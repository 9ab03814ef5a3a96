"""
Configuration management using environment variables and .env files.
"""

import os
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv
from loguru import logger


class Config:
    """Process-level settings that do not belong in a run configuration."""

    def __init__(self, env_file: Optional[str] = None):
        """
        Initialize configuration.

        Args:
            env_file: Path to .env file. If None, looks for .env in project root.
        """
        if env_file is None:
            project_root = Path(__file__).parent.parent.parent
            env_file = project_root / ".env"

        if Path(env_file).exists():
            load_dotenv(env_file)
            logger.info(f"Loaded environment variables from {env_file}")
        else:
            logger.debug(f"Environment file {env_file} not found. Using system environment variables.")

    @property
    def log_level(self) -> str:
        """Get logging level."""
        return os.getenv("LOG_LEVEL", "INFO")

    @property
    def log_file(self) -> str:
        """Get log file path."""
        return os.getenv("LOG_FILE", "logs/tocq.log")

    @property
    def output_dir(self) -> str:
        """Default directory for generated datasets, models and reports."""
        return os.getenv("TOCQ_OUTPUT_DIR", "results")

    @property
    def workers(self) -> int:
        """Number of threads used for independent sweep legs."""
        value = os.getenv("TOCQ_WORKERS", "1")
        try:
            workers = int(value)
        except ValueError:
            raise ValueError(f"TOCQ_WORKERS must be an integer, got {value!r}")
        if workers < 1:
            raise ValueError(f"TOCQ_WORKERS must be >= 1, got {workers}")
        return workers

    def validate(self) -> bool:
        """
        Validate the environment settings.

        Returns:
            True if every setting parses, False otherwise.
        """
        try:
            self.workers
            if self.log_level.upper() not in {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}:
                raise ValueError(f"Unknown LOG_LEVEL {self.log_level!r}")
            logger.debug("Environment configuration validated")
            return True
        except ValueError as e:
            logger.error(f"Configuration validation failed: {e}")
            return False


# Global configuration instance
config = Config()
