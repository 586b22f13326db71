"""Fault-tolerance verification of quantum error-correction gadgets by symbolic execution."""

__version__ = "0.1.0"
