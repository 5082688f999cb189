"""
Server settings: request limits and log level, read from the environment.
"""

from app.config.settings import Settings, settings

__all__ = ["Settings", "settings"]
