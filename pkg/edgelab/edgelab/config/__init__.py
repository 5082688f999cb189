"""
Configuration management module.
"""

from edgelab.config.settings import Environment, LogLevel, Settings, UpdateMode, settings

__all__ = ["Environment", "LogLevel", "Settings", "UpdateMode", "settings"]
