"""Constructive L^p De Rham theory on singular spaces."""

__version__ = '0.1'
