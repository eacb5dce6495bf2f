"""Thom-Sebastiani joins of mixed Hodge structures with monodromy, in exact arithmetic."""

__version__ = "0.1.0"
