"""
Stabiliser Tools

Exact binary-symplectic algebra for Pauli operators and stabiliser groups:
- Pauli arithmetic with phase tracking (XZ = -iY)
- GF(2) linear algebra on numpy matrices and packed integers
- Signed stabiliser groups, membership, logical bases and measurement
- Conjugate (reversible) pairs and their biorthogonal bases
- Lattice locality checks and error classification
"""

__version__ = "0.1.0"
