"""
Logging setup for the library and the CLI.
"""

import logging

from edgelab.config import LogLevel

_LEVELS = {
    LogLevel.DEBUG: logging.DEBUG,
    LogLevel.INFO: logging.INFO,
    LogLevel.WARN: logging.WARNING,
    LogLevel.ERROR: logging.ERROR,
}


def configure_logging(level: LogLevel) -> None:
    """
    Attach a stream handler to the ``edgelab`` logger and set its level.

    Calling it twice replaces the level but never stacks handlers.
    """
    root = logging.getLogger("edgelab")
    root.setLevel(_LEVELS[level])

    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
        root.addHandler(handler)
