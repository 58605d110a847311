"""Domains bounded by hyperbola branches and the algebraic maps onto them."""

__version__ = "0.1.0"
