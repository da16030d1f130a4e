"""Gram determinants, hyperplane distances and the divergence of Gram ratios."""

__version__ = "0.1.0"
