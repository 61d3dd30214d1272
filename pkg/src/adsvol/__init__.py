"""Numerical toolkit for volumes of proper quotients of SO0(n,1).

Builds Fuchsian surface-group representations, equivariant contracting maps
between copies of H^n, the fixed-point fibration of the group over H^n, and
computes quotient volumes both by the closed formula and by direct fiberwise
integration, cross-checking the two against each other.
"""

__version__ = "0.1.0"
