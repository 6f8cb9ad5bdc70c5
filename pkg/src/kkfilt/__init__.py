"""Exact tower calculus for KK-filtrations: Hom, Ext, Pext, lim and lim^1."""

__version__ = "0.1.0"
