"""Orthonormal polynomial bases on the reference elements.

Each basis function is a product of orthonormal Jacobi polynomials in
collapsed coordinates (a, b, c, d) times powers of (1-b), (1-c), (1-d) that
undo the collapse.  Leading constants are 1 (tesseract), sqrt(8)
(tetrahedral prism) and 8 (pentatope); each equals the inverse square root of
the product of the collapse Jacobian factors 1/2, 1/4, 1/8 that appear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .elements import (PENTATOPE, TESSERACT, TETPRISM, DomainError, ElementKind,
                       contains)
from .jacobi import ParameterError, is_extended, jacobi_orthonormal_all

_LEADING = {TESSERACT: 1.0, TETPRISM: math.sqrt(8.0), PENTATOPE: 8.0}
_SINGULAR = 1e-13


@dataclass(frozen=True)
class MultiIndex:
    i: int
    j: int
    k: int
    q: int

    def __iter__(self):
        return iter((self.i, self.j, self.k, self.q))

    @property
    def degree(self) -> int:
        return self.i + self.j + self.k + self.q


def admissible(kind, idx, p=None) -> bool:
    """Whether ``idx`` is a valid index (of degree at most ``p`` if given)."""
    kind = ElementKind.parse(kind)
    i, j, k, q = idx
    if min(i, j, k, q) < 0:
        return False
    if p is None:
        return True
    if kind is TESSERACT:
        return max(i, j, k, q) <= p
    if kind is TETPRISM:
        return i + j + k <= p and q <= p
    return i + j + k + q <= p


def n_dof(kind, p: int) -> int:
    kind = ElementKind.parse(kind)
    if kind is TESSERACT:
        return (p + 1) ** 4
    if kind is TETPRISM:
        return (p + 1) ** 2 * (p + 2) * (p + 3) // 6
    return (p + 1) * (p + 2) * (p + 3) * (p + 4) // 24


@dataclass(frozen=True)
class BasisSet:
    kind: ElementKind
    degree: int
    indices: tuple

    def __len__(self):
        return len(self.indices)


def basis_set(kind, p: int) -> BasisSet:
    """Admissible indices of degree ``p``, graded by total degree then lexicographic."""
    kind = ElementKind.parse(kind)
    if not 0 <= p <= 20:
        raise ParameterError(f"degree must be in [0, 20], got {p}")
    span = range(p + 1)
    idx = [(i, j, k, q) for i in span for j in span for k in span for q in span
           if admissible(kind, (i, j, k, q), p)]
    idx.sort(key=lambda t: (sum(t), t))
    return BasisSet(kind, p, tuple(MultiIndex(*t) for t in idx))


def total_degree_indices(max_degree: int):
    """All (i, j, k, q) with i+j+k+q <= max_degree, graded order.

    On every element these functions span the polynomials of total degree
    at most ``max_degree``.
    """
    span = range(max_degree + 1)
    idx = [(i, j, k, q) for i in span for j in span for k in span for q in span
           if i + j + k + q <= max_degree]
    idx.sort(key=lambda t: (sum(t), t))
    return idx


def _collapse(num, den, ext):
    """num/den - 1, or -1 where den vanishes (the vertex limit)."""
    if ext:
        out = [mpmath.mpf(-1) if abs(d) < _SINGULAR else min(max(n / d - 1, -1), 1)
               for n, d in zip(num, den)]
        return np.array(out, dtype=object)
    small = np.abs(den) < _SINGULAR
    val = num / np.where(small, 1.0, den) - 1
    return np.clip(np.where(small, -1.0, val), -1.0, 1.0)


def collapsed_coords(kind, points, check=True):
    """Map points to collapsed coordinates (a, b, c, d), stacked on the last axis."""
    kind = ElementKind.parse(kind)
    x = np.asarray(points)
    if x.dtype != object:
        x = x.astype(float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if check and not np.all(contains(kind, x, 1e-10)):
        raise DomainError(f"point outside the reference {kind}")
    ext = is_extended(x)
    x1, x2, x3, x4 = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
    if kind is TESSERACT:
        out = x.copy()
    elif kind is TETPRISM:
        a = _collapse(-2 * (1 + x1), x2 + x3, ext)
        b = _collapse(2 * (1 + x2), 1 - x3, ext)
        out = np.stack([a, b, x3, x4], axis=1)
    else:
        a = _collapse(-2 * (x1 + 1), x2 + x3 + x4 + 1, ext)
        b = _collapse(-2 * (1 + x2), x3 + x4, ext)
        c = _collapse(2 * (1 + x3), 1 - x4, ext)
        out = np.stack([a, b, c, x4], axis=1)
    return out[0] if single else out


class _Factors:
    """Cache of 1D orthonormal Jacobi values for one batch of points."""

    def __init__(self, kind, coords, max_degree):
        self.kind = kind
        self.c = coords
        self.p = max_degree
        self.ext = is_extended(coords)
        self._cache = {}

    def jac(self, axis, alpha, n):
        key = (axis, alpha)
        if key not in self._cache:
            self._cache[key] = jacobi_orthonormal_all(self.p, alpha, 0, self.c[:, axis])
        return self._cache[key][n]

    def power(self, axis, e):
        key = ("pow", axis, e)
        if key not in self._cache:
            self._cache[key] = (1 - self.c[:, axis]) ** e
        return self._cache[key]

    def psi(self, idx):
        i, j, k, q = idx
        kind = self.kind
        if kind is TESSERACT:
            return self.jac(0, 0, i) * self.jac(1, 0, j) * self.jac(2, 0, k) * self.jac(3, 0, q)
        lead = _LEADING[kind]
        if self.ext:
            lead = mpmath.sqrt(8) if kind is TETPRISM else mpmath.mpf(8)
        val = (self.jac(0, 0, i) * self.jac(1, 2 * i + 1, j) * self.power(1, i)
               * self.jac(2, 2 * i + 2 * j + 2, k) * self.power(2, i + j))
        if kind is TETPRISM:
            return lead * val * self.jac(3, 0, q)
        return (lead * val * self.jac(3, 2 * i + 2 * j + 2 * k + 3, q)
                * self.power(3, i + j + k))


def basis_eval(kind, idx, points):
    """Evaluate one orthonormal basis function at reference-frame points."""
    kind = ElementKind.parse(kind)
    idx = tuple(idx)
    if len(idx) != 4 or not admissible(kind, idx):
        raise ParameterError(f"inadmissible index {idx} for {kind}")
    x = np.asarray(points)
    single = x.ndim == 1
    coords = collapsed_coords(kind, np.atleast_2d(x))
    val = _Factors(kind, coords, max(idx)).psi(idx)
    return val[0] if single else val


def vandermonde(kind, indices, points, check=True):
    """Matrix of basis values, shape (n_points, n_indices)."""
    kind = ElementKind.parse(kind)
    indices = [tuple(t) for t in indices]
    for t in indices:
        if not admissible(kind, t):
            raise ParameterError(f"inadmissible index {t} for {kind}")
    coords = collapsed_coords(kind, np.atleast_2d(np.asarray(points)), check=check)
    pmax = max((max(t) for t in indices), default=0)
    fac = _Factors(kind, coords, pmax)
    return np.stack([fac.psi(t) for t in indices], axis=1)


def gram_matrix(kind, p: int, oracle_strength: int | None = None):
    """Gram matrix of ``basis_set(kind, p)`` under a collapsed tensor rule.

    ``oracle_strength`` is the number of Gauss-Legendre points per axis.
    """
    from .duffy import duffy_points

    kind = ElementKind.parse(kind)
    if oracle_strength is None:
        oracle_strength = 2 * p + 4
    if oracle_strength < 2 * p + 4:
        raise ParameterError(
            f"oracle strength {oracle_strength} below required {2 * p + 4}")
    pts, wts = duffy_points(kind, min(oracle_strength, 20))
    indices = basis_set(kind, p).indices
    gram = np.zeros((len(indices), len(indices)))
    chunk = max(1, 2 ** 22 // len(indices))
    for start in range(0, len(wts), chunk):
        V = vandermonde(kind, indices, pts[start:start + chunk])
        gram += (V * wts[start:start + chunk, None]).T @ V
    return gram
