"""
Floquet Tools

Measurement-driven Floquet sequences built on conjugate stabiliser groups:
- Running sequences with seeded or forced outcomes and tracking logicals
- Extracting the logical action of a period
- A dense statevector oracle for projector and transition identities
- Generalised logical unitaries: condition checks, canonical form, correlations
- A catalog of example sequences, including the honeycomb code
"""

__version__ = "0.1.0"
