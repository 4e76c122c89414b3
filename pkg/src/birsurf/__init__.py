"""Exact-arithmetic analysis of birational self-maps of rational surfaces."""

__version__ = "0.1.0"
