"""Conflict-free PRACH root sequence index planning via graph coloring and QUBO samplers."""

__version__ = "0.1.0"
