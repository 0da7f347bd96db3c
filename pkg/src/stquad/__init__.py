"""Fully symmetric quadrature, orthonormal bases and 0/1-polytope sequences for
four-dimensional space-time elements (tesseract, tetrahedral prism, pentatope).
"""
from .basis import basis_eval, basis_set, collapsed_coords, gram_matrix, vandermonde
from .decomp import Decomposition, decomposition_signature, enumerate_decompositions
from .duffy import duffy_rule
from .elements import (PENTATOPE, TESSERACT, TETPRISM, DomainError, ElementKind,
                       UnsupportedKindError, Variant, bary_to_cart, contains,
                       monomial_integral, volume)
from .harness import (convergence_experiment, exactness_experiment, grid_integrate,
                      kuhn_freudenthal)
from .jacobi import (ParameterError, gauss_legendre, jacobi_eval,
                     jacobi_orthonormal_eval)
from .polytope_seq import is_prism_over, sequence_a, sequence_b, vertex_count_profile
from .quadgen import (MomentSystem, SearchResult, SolveConfig, moment_system, residual,
                      search, solve_weights, verify_rule)
from .rules import (QuadratureRule, RuleFormatError, RuleValidationError, bundled_rules,
                    get_rule, read_rule, write_rule)
from .symmetry import OrbitFamily, OrbitInstance, expand, orbit_families

__version__ = "0.1.0"

__all__ = [
    "basis_eval", "basis_set", "collapsed_coords", "gram_matrix", "vandermonde",
    "Decomposition", "decomposition_signature", "enumerate_decompositions", "duffy_rule",
    "PENTATOPE", "TESSERACT", "TETPRISM", "DomainError", "ElementKind",
    "UnsupportedKindError", "Variant", "bary_to_cart", "contains", "monomial_integral",
    "volume", "ParameterError", "gauss_legendre", "jacobi_eval", "jacobi_orthonormal_eval",
    "is_prism_over", "sequence_a", "sequence_b", "vertex_count_profile", "MomentSystem",
    "SearchResult", "SolveConfig", "moment_system", "residual", "search", "solve_weights",
    "verify_rule", "QuadratureRule", "RuleFormatError", "RuleValidationError",
    "bundled_rules", "get_rule", "read_rule", "write_rule", "OrbitFamily",
    "OrbitInstance", "expand", "orbit_families", "convergence_experiment",
    "exactness_experiment", "grid_integrate", "kuhn_freudenthal",
]
