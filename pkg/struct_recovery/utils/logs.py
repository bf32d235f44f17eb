#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from loguru import logger as _logger

LOG_ROOT_ENV = "STRUCT_RECOVERY_ROOT"
DEFAULT_LOG_ROOT = Path.home() / ".struct-recovery" / "runtime"


class InterceptHandler(logging.Handler):
    """Forward stdlib ``logging`` records into loguru."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level = _logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        # Find the caller outside the logging module so loguru reports the right frame
        frame, depth = logging.currentframe(), 2
        while frame and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1

        _logger.opt(depth=depth, exception=record.exc_info).log(
            level, record.getMessage()
        )


def log_directory(root: Optional[Path | str] = None) -> Path:
    """
    Where run logs are written: ``$STRUCT_RECOVERY_ROOT/logs`` when the variable
    is set, else ``root/logs``, else ``~/.struct-recovery/runtime/logs``. The directory is created.
    """
    base = os.environ.get(LOG_ROOT_ENV) or root or DEFAULT_LOG_ROOT
    logs = Path(base).expanduser() / "logs"
    logs.mkdir(parents=True, exist_ok=True)
    return logs


def define_log_level(
    print_level: str = "INFO",
    logfile_level: str = "DEBUG",
    name: Optional[str] = None,
    logs_dir: Optional[Path] = None,
):
    """Send ``print_level`` and above to stderr, ``logfile_level`` and above to a dated file."""
    formatted_date = datetime.now().strftime("%Y%m%d")
    log_name = (
        f"{name}_{formatted_date}" if name else formatted_date
    )  # name a log with prefix name

    if logs_dir is None:
        logs_dir = log_directory()
    else:
        logs_dir.mkdir(parents=True, exist_ok=True)

    _logger.remove()
    _logger.add(sys.stderr, level=print_level)
    _logger.add(logs_dir / f"{log_name}.txt", level=logfile_level)

    # Library modules use logging.getLogger(__name__); route them here
    logging.basicConfig(handlers=[InterceptHandler()], level=0, force=True)
    return _logger
