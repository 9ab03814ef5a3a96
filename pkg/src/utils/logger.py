"""
Loguru sinks for the toolkit: a coloured stderr console and a rotating file.

stdout is reserved for command summaries, so nothing here writes to it.
"""

import sys
from pathlib import Path
from typing import Optional
from loguru import logger
from .config import config

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} | {message}"


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    """
    Replace every loguru sink with the toolkit's console and file sinks.

    Args:
        level: Minimum level; LOG_LEVEL when omitted.
        log_file: Log path; LOG_FILE when omitted. An empty string keeps
            logging on the console only.
    """
    level = (level or config.log_level).upper()
    log_file = config.log_file if log_file is None else log_file

    logger.remove()
    logger.add(sys.stderr, level=level, format=CONSOLE_FORMAT, colorize=True)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_file,
            level=level,
            format=FILE_FORMAT,
            rotation="1 day",
            retention="30 days",
            compression="zip",
        )

    logger.debug(f"Logging at {level} to stderr" + (f" and {log_file}" if log_file else ""))
    return logger


setup_logging()
