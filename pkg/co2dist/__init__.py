"""Lognormal size-distribution analysis of national CO2 emissions."""

__version__ = "0.1.0"
