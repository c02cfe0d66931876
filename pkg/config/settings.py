"""
Compiler settings re-exported for the entry point; values come from FLAGC_* variables.
"""
from src.core.config import Settings, Tolerances, settings

__all__ = ["Settings", "Tolerances", "settings"]
