"""Audit harness for measuring sensitive-attribute use in generated predictive code."""

__version__ = "0.1.0"
