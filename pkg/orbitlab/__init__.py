"""Exact arithmetic for shearing of divergent diagonal orbits."""

__version__ = "0.1.0"

__all__ = ["__version__"]
