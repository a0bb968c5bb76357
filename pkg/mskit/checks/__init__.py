"""Invariant checks package."""

from .base import LEVELS, CheckResult, InvariantCheck, Level
from .check_loader import CheckLoader
from .check_registry import CheckRegistry

__all__ = ["LEVELS", "CheckResult", "InvariantCheck", "Level", "CheckLoader", "CheckRegistry"]
