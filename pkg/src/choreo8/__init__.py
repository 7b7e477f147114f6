"""Numerical laboratory for the equal-mass figure-8 three-body choreography."""

__version__ = "0.1.0"
