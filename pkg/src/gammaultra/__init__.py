"""Gamma-ultraproducts of structures omitting unary types, with finite and
symbolic instantiations and a toolkit for torsion abelian groups."""

__version__ = "0.1.0"
