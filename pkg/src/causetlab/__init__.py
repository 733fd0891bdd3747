"""Exact and Monte Carlo tools for causal-set growth processes."""

__version__ = "0.1.0"
