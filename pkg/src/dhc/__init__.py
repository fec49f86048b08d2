"""Formal engine for machine-readable traffic rules."""

__version__ = "0.1.0"
