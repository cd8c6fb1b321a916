"""Computational tools for abstract algebraic logic over finite structures."""

__version__ = "0.1.0"
