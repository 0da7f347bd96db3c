"""scikit-learn style wrappers around the library.

* :class:`CollapsedCoordinates` maps element points to collapsed coordinates.
* :class:`OrthonormalBasisFeatures` expands points into orthonormal basis
  values, a polynomial feature map that is orthonormal on the element.
* :class:`SymmetricRuleGenerator` searches for a symmetric rule in ``fit``
  and integrates functions with it afterwards.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .basis import basis_set, collapsed_coords, vandermonde
from .elements import DomainError, ElementKind, contains
from .jacobi import ParameterError
from .quadgen import SolveConfig, best_rule, search, verify_rule


def check_kind(kind) -> ElementKind:
    """Parse an element name, raising :class:`ParameterError` on failure."""
    return ElementKind.parse(kind)


def check_degree(p, name="degree", upper=20) -> int:
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or not 0 <= p <= upper:
        raise ParameterError(f"{name} must be an integer in [0, {upper}], got {p!r}")
    return int(p)


def check_points(X, kind=None, tol=1e-10) -> np.ndarray:
    """Validate an (n, 4) float array, optionally requiring points in the element."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 4:
        raise ParameterError(f"expected 4 columns, got {X.shape[1]}")
    if kind is not None and not np.all(contains(check_kind(kind), X, tol)):
        raise DomainError(f"points outside the reference {check_kind(kind)}")
    return X


class CollapsedCoordinates(TransformerMixin, BaseEstimator):
    """Map reference-element points to collapsed coordinates (a, b, c, d)."""

    def __init__(self, element="pentatope"):
        self.element = element

    def fit(self, X=None, y=None):
        self.kind_ = check_kind(self.element)
        if X is not None:
            check_points(X, self.kind_)
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "kind_")
        return collapsed_coords(self.kind_, check_points(X, self.kind_))


class OrthonormalBasisFeatures(TransformerMixin, BaseEstimator):
    """Evaluate every orthonormal basis function of degree ``degree`` at the rows of X."""

    def __init__(self, element="pentatope", degree=2):
        self.element = element
        self.degree = degree

    def fit(self, X=None, y=None):
        self.kind_ = check_kind(self.element)
        self.indices_ = basis_set(self.kind_, check_degree(self.degree)).indices
        if X is not None:
            check_points(X, self.kind_)
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "indices_")
        return vandermonde(self.kind_, self.indices_, check_points(X, self.kind_))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "indices_")
        return np.array([f"psi_{i}{j}{k}{q}" for i, j, k, q in self.indices_], dtype=object)


class SymmetricRuleGenerator(BaseEstimator):
    """Search for a fully symmetric rule with positive weights and interior points.

    After ``fit`` the rule is available as ``rule_`` (``None`` if the search
    failed) and all attempted decompositions as ``results_``.
    """

    def __init__(self, element="pentatope", strength=2, n_points=5, n_starts=16,
                 random_state=0, precision="double", n_jobs=1,
                 skip_underdetermined=False):
        self.element = element
        self.strength = strength
        self.n_points = n_points
        self.n_starts = n_starts
        self.random_state = random_state
        self.precision = precision
        self.n_jobs = n_jobs
        self.skip_underdetermined = skip_underdetermined

    def fit(self, X=None, y=None):
        kind = check_kind(self.element)
        cfg = SolveConfig(n_starts=int(self.n_starts), rng_seed=int(self.random_state),
                          precision_mode=self.precision, jobs=int(self.n_jobs),
                          skip_underdetermined=bool(self.skip_underdetermined))
        self.results_ = search(kind, check_degree(self.strength, "strength"),
                               int(self.n_points), cfg)
        self.rule_ = best_rule(self.results_)
        return self

    def integrate(self, func):
        """Apply the fitted rule to ``func`` (maps an (n, 4) array to n values)."""
        check_is_fitted(self, "results_")
        if self.rule_ is None:
            raise ValueError("the search found no admissible rule")
        return self.rule_.integrate(func)

    def score(self, X=None, y=None):
        """Negative maximum relative monomial error; 0 is a perfect rule."""
        check_is_fitted(self, "results_")
        if self.rule_ is None:
            return -np.inf
        return -verify_rule(self.rule_).max_error
