"""Minimal complex spherical representations of oriented graphs and
classification of the largest complex spherical 3-codes."""

__version__ = "0.1.0"
