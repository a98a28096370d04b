"""Verification toolkit for finite-dimensional ordered vector spaces.

Core layers: exact rational linear algebra and polyhedral geometry
(`exact`), Euclidean Jordan algebras (`eja`), cone models and order
isomorphisms (`cones`), axiom checkers (`axioms`), bipartite composites and
steering (`composite`), reconstruction decision procedures (`classify`),
and the fixture registry plus CLI (`fixtures`, `cli`).
"""

__version__ = "1.0.0"
