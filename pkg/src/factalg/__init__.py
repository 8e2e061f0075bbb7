"""Finite, exact models of factorization algebras on one-dimensional stratified spaces."""

__version__ = "0.1.0"
