"""Multichannel prefix codes: selvage codes, tree-decodability, separation and search."""

__version__ = "0.1.0"
