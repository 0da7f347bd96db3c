"""Tensor-product and collapsed (Duffy) rules on the reference elements.

A simplex of dimension d is collapsed along its last coordinate t via
``y = ((1 - t) y' - (1 + t)) / 2`` with Jacobian ``((1 - t) / 2)^(d-1)``,
where y' ranges over the (d-1)-simplex.  Recursing down to an interval
leaves only one-dimensional Gauss-Legendre rules.

The Jacobian raises the polynomial degree seen by the collapsed direction
by d-1, so that direction gets ``ceil((d-1)/2)`` extra Gauss-Legendre
points.  With ``n`` points per axis every rule is then exact for total
degree ``2n - 1``.
"""
from __future__ import annotations

import numpy as np

from .elements import TESSERACT, TETPRISM, ElementKind
from .jacobi import ParameterError, gauss_legendre
from .rules import QuadratureRule


def _simplex_rule(dim, n, extended):
    gl = gauss_legendre(n, extended)
    if dim == 1:
        return gl.nodes.reshape(-1, 1), gl.weights
    inner_x, inner_w = _simplex_rule(dim - 1, n, extended)
    extra = dim // 2  # ceil((dim - 1) / 2)
    outer = gauss_legendre(n + extra, extended)
    pts, wts = [], []
    for t, wt in zip(outer.nodes, outer.weights):
        scale = (1 - t) / 2
        y = scale * inner_x - (1 + t) / 2
        pts.append(np.column_stack([y, np.full(len(inner_w), t, dtype=y.dtype)]))
        wts.append(wt * scale ** (dim - 1) * inner_w)
    return np.concatenate(pts), np.concatenate(wts)


def _tensor(nodes_a, w_a, nodes_b, w_b):
    na, nb = len(w_a), len(w_b)
    pts = np.concatenate([np.repeat(nodes_a, nb, axis=0),
                          np.tile(nodes_b, (na, 1))], axis=1)
    return pts, np.repeat(w_a, nb) * np.tile(w_b, na)


def duffy_points(kind, pts_per_axis: int, extended: bool = False):
    """Points and weights of the collapsed tensor rule, reference frame."""
    kind = ElementKind.parse(kind)
    n = int(pts_per_axis)
    if not 1 <= n <= 20:
        raise ParameterError(f"pts_per_axis must be in [1, 20], got {pts_per_axis}")
    gl = gauss_legendre(n, extended)
    line = (gl.nodes.reshape(-1, 1), gl.weights)
    if kind is TESSERACT:
        pts, wts = line
        for _ in range(3):
            pts, wts = _tensor(pts, wts, *line)
        return pts, wts
    if kind is TETPRISM:
        tet = _simplex_rule(3, n, extended)
        return _tensor(*tet, *line)
    return _simplex_rule(4, n, extended)


def duffy_rule(kind, pts_per_axis: int, extended: bool = False) -> QuadratureRule:
    """Collapsed tensor-product rule exact for total degree 2*pts_per_axis - 1."""
    pts, wts = duffy_points(kind, pts_per_axis, extended)
    return QuadratureRule.from_points(kind, 2 * int(pts_per_axis) - 1, pts, wts, "duffy")

