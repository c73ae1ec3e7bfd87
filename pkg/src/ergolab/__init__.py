"""Finite models of measured equivalence relations, Bernoulli extensions and percolation."""

__version__ = "0.1.0"
