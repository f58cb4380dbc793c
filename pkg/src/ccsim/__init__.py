"""Deterministic simulator for interleaved smart-contract transactions."""

__version__ = "0.1.0"
