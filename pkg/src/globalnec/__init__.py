"""Proof kernel and paradox workbench for global necessitation."""

__version__ = "0.1.0"
