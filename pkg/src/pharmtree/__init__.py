"""Pharmacophore-conditioned generation of synthesizable molecules."""

__version__ = "0.1.0"
