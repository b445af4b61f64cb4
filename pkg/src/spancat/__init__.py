"""Span composition via fake pullbacks over a suitable factorization system."""

__version__ = "0.1.0"
