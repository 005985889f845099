"""Subset-sum t-designs in finite abelian groups and elliptic-curve evaluation codes."""

__version__ = "0.1.0"
