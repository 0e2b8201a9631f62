"""
Logging configuration for the submodular toolkit.

Uses structlog for structured logging with JSON output and optional
file-based logging. Everything goes to stderr; stdout carries reports.
"""

import logging
import sys
import os
from datetime import datetime, timezone
from typing import Optional
import structlog
from structlog.stdlib import LoggerFactory

from core.config import settings


def setup_logging(level: Optional[str] = None) -> structlog.stdlib.BoundLogger:
    """Setup structured logging configuration with optional file-based logging."""

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer() if not settings.DEBUG else structlog.dev.ConsoleRenderer(),
        ],
        context_class=dict,
        logger_factory=LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    formatter = logging.Formatter('%(message)s')

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, (level or settings.LOG_LEVEL).upper()))
    root_logger.handlers.clear()

    # Console handler (always enabled)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if settings.ENABLE_FILE_LOGGING:
        os.makedirs(settings.LOG_DIR, exist_ok=True)
        stamp = datetime.now(timezone.utc).strftime('%Y%m%d')

        app_file_handler = logging.FileHandler(
            os.path.join(settings.LOG_DIR, f"app_{stamp}.log"), encoding='utf-8'
        )
        app_file_handler.setFormatter(formatter)
        app_file_handler.setLevel(logging.INFO)
        root_logger.addHandler(app_file_handler)

        error_file_handler = logging.FileHandler(
            os.path.join(settings.LOG_DIR, f"error_{stamp}.log"), encoding='utf-8'
        )
        error_file_handler.setFormatter(formatter)
        error_file_handler.setLevel(logging.ERROR)
        root_logger.addHandler(error_file_handler)

    return structlog.get_logger()


def get_logger(name: str = None) -> structlog.stdlib.BoundLogger:
    """Get a logger instance."""
    return structlog.get_logger(name)
