"""Exact verification of BV and BV∞ structures on finite graded-commutative dg-algebras,
their degeneration and dΔ-lemma certificates, and Maurer-Cartan deformation solving."""

__version__ = "0.1.0"
