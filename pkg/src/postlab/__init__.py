"""Exact certification of the postulation of a fat point plus general lines in P^3."""

from .exactlin import DEFAULT_PRIME, KERNEL

__version__ = "0.1.0"

__all__ = ["DEFAULT_PRIME", "KERNEL", "__version__"]
