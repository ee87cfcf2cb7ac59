"""Utility functions and configuration management."""

from greedy_sbtm.utils.config import get_settings
from greedy_sbtm.utils.logging import get_logger

__all__ = ["get_logger", "get_settings"]
