"""Equation discovery via dimensional analysis, UPINNs, and symbolic regression."""

__version__ = "0.1.0"
