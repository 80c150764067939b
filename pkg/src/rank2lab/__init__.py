"""Exact verification laboratory for nonabelian Toda-type systems of rank-2 Lie algebras.

Modules: ``algebra`` (Cartan data, gradings), ``reps`` (fundamental
representations), ``groups`` (exact group elements), ``identities``
(determinant identities), ``lax`` (graded L+/L-), ``solutions`` (general
solution K = M+ M-), ``systems`` (residuals of the integrable systems) and
``cli`` (command-line harness).
"""
from .algebra import AlgebraId, as_algebra, cartan_matrix, grading
from .reps import Representation, build_fundamental, pair, verify_relations

__all__ = ["AlgebraId", "Representation", "as_algebra", "build_fundamental", "cartan_matrix",
           "grading", "pair", "verify_relations"]
__version__ = "0.1.0"
