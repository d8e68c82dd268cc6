"""Logger utility."""

import logging
import os
import sys

import structlog

_configured = False


def configure_logging(level: str | None = None) -> None:
    """Configure structlog once for console output.

    Parameters
    ----------
    level : str | None, default=None
        Log level name. Falls back to ``DESIGN_EXPLORER_LOG_LEVEL``, then ``WARNING``.
    """
    global _configured
    name = (level or os.getenv("DESIGN_EXPLORER_LOG_LEVEL", "WARNING")).upper()
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelNamesMapping().get(name, logging.WARNING)
        ),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    _configured = True


def get_logger(name: str):
    """Get a configured logger instance."""
    if not _configured:
        configure_logging()
    return structlog.get_logger(name)
