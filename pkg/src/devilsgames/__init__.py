"""Workbench for first-order sentences over the reals and devil's games."""

__version__ = "0.1.0"
