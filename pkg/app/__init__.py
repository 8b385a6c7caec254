"""Layered-state stability toolkit for the two-layer coupled Lengyel-Epstein system."""

__version__ = "0.1.0"
