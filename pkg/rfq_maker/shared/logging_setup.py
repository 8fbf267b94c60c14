"""
Logging configuration for command-line runs.

Library modules only create loggers; handlers are installed here.
"""

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """
    Install a single stream handler on the package logger.

    Args:
        level: Logging level name (e.g. "INFO", "DEBUG")
    """
    root = logging.getLogger("rfq_maker")
    root.setLevel(level.upper())
    if not any(getattr(h, "_rfq_maker", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._rfq_maker = True
        root.addHandler(handler)
