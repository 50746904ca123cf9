"""Rigid isotopy classification of simple plane sextics."""

__version__ = "0.1.0"
