"""Verification kit for sunflower combinatorics and monotone circuit bounds.

Exact rational probability oracles at small scale, seeded Monte-Carlo
estimators beyond, and the constructive objects they certify: robust
sunflower extraction, the closure/trim approximator algebra for monotone
circuits, a polynomial-image DNF over prime fields, clique-sunflowers with
Janson certificates, and code-based multilinear polynomials.
"""

__version__ = "0.1.0"
