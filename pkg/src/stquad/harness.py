"""Validation experiments: single-element exactness and grid convergence.

Both experiments work on the unit frame.  Rules stored on the reference
element are carried over by the affine map ``u = (x + 1) / 2``.

Convergence grids split [0, 1]^4 into m^4 subcubes and, for simplex-type
elements, split each subcube by the Kuhn-Freudenthal construction.  The
pentatope cells are the 24 permutation simplices
``1 >= y_s1 >= y_s2 >= y_s3 >= y_s4 >= 0``.  The tetrahedral prism cells are
the six 3D permutation simplices on the first three axes, extruded along x4.

Reference integrals of f1, f2 and f3 are exact up to the precision of 1D
quadrature.  Each integrand is a function of a sum of univariate terms, so
the 4D integral factors into 1D integrals.  f1 is a product of real
integrals.  f2 and f3 are imaginary parts of products of complex ones.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .elements import (PENTATOPE, TESSERACT, TETPRISM, ElementKind, contains,
                       eval_monomials, monomial_exponents, monomial_integral, volume)
from .jacobi import ParameterError, is_extended
from .rules import QuadratureRule

CSV_COLUMNS = ("element", "strength", "p_or_m", "h", "J", "J_inf", "percent_error")
_KIND_INDEX = {TESSERACT: 0, TETPRISM: 1, PENTATOPE: 2}


def unit_rule(rule: QuadratureRule, extended=False):
    """Points and weights of ``rule`` carried to the unit frame."""
    pts, wts = rule.expanded(extended)
    return (pts + 1) / 2, wts / 16


@dataclass(frozen=True)
class RandomPolynomial:
    degree: int
    coefficients: dict = field(repr=False)

    @classmethod
    def draw(cls, degree: int, seed: int = 0, kind=None):
        """Standard-normal coefficients for every monomial of degree <= ``degree``.

        The generator is seeded from ``(seed, element, degree)`` so each
        table entry is reproducible on its own.
        """
        tag = _KIND_INDEX[ElementKind.parse(kind)] if kind is not None else 3
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), tag, int(degree)]))
        exps = monomial_exponents(degree)
        return cls(degree, dict(zip(exps, rng.standard_normal(len(exps)))))

    def __call__(self, points):
        exps = list(self.coefficients)
        vals = eval_monomials(points, exps)
        coef = np.array([self.coefficients[e] for e in exps])
        if is_extended(vals):
            coef = np.array([mpmath.mpf(c) for c in coef], dtype=object)
        return vals.dot(coef)

    def exact_integral(self, kind, variant="unit", extended=False):
        total = sum(mpmath.mpf(c) * monomial_integral(kind, *e, variant=variant, extended=True)
                    for e, c in self.coefficients.items())
        return total if extended else float(total)


def percent_error(J, J_inf) -> float:
    return float(abs(J - J_inf) / abs(J_inf) * 100)


@dataclass(frozen=True)
class ExactnessRow:
    element: ElementKind
    strength: int
    p: int
    J: float
    J_inf: float
    percent_error: float

    def csv_row(self):
        return (str(self.element), self.strength, self.p, "", _fmt(self.J),
                _fmt(self.J_inf), _fmt(self.percent_error))


def exactness_experiment(kind, rules, p_max: int, seed: int = 0, extended=False):
    """Percent error of random polynomials of order 0..p_max for each rule.

    ``rules`` is an iterable of :class:`QuadratureRule` (or strengths, looked
    up in the bundled catalog).
    """
    from .rules import get_rule

    kind = ElementKind.parse(kind)
    rows = []
    for r in rules:
        rule = r if isinstance(r, QuadratureRule) else get_rule(kind, r)
        if rule.kind is not kind:
            raise ParameterError(f"rule for {rule.kind} used on {kind}")
        pts, wts = unit_rule(rule, extended)
        for p in range(p_max + 1):
            poly = RandomPolynomial.draw(p, seed, kind)
            J = wts.dot(poly(pts))
            J_inf = poly.exact_integral(kind, extended=extended)
            rows.append(ExactnessRow(kind, rule.strength, p, J, J_inf, percent_error(J, J_inf)))
    return rows


@dataclass(frozen=True)
class Grid4:
    """Affine cells covering [0, 1]^4; cell c maps reference x to ``A[c] @ x + b[c]``."""

    kind: ElementKind
    m: int
    A: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.b)

    @property
    def n_cells(self) -> int:
        return len(self.b)

    @property
    def h(self) -> float:
        return (1.0 / self.n_cells) ** 0.25

    def cell_volumes(self):
        return np.abs(np.linalg.det(self.A)) * volume(self.kind)

    def cell_vertices(self, c):
        from .elements import vertices
        return vertices(self.kind) @ self.A[c].T + self.b[c]


def _kuhn_matrices(dim):
    """Columns are the path vertices e_s1, e_s1 + e_s2, ... of each permutation."""
    mats = []
    for perm in itertools.permutations(range(dim)):
        M = np.zeros((dim, dim))
        for k in range(dim):
            M[list(perm[:k + 1]), k] = 1.0
        mats.append(M)
    return mats


def _local_maps(kind):
    if kind is TESSERACT:
        return [np.eye(4)]
    if kind is PENTATOPE:
        return _kuhn_matrices(4)
    out = []
    for M3 in _kuhn_matrices(3):
        M = np.eye(4)
        M[:3, :3] = M3
        out.append(M)
    return out


def kuhn_freudenthal(kind, m: int) -> Grid4:
    """Triangulate [0, 1]^4 into m^4 subcubes, split per element kind."""
    kind = ElementKind.parse(kind)
    if not 1 <= m <= 12:
        raise ParameterError(f"m must be in [1, 12], got {m}")
    local = _local_maps(kind)
    corners = np.array(list(itertools.product(range(m), repeat=4)), float) / m
    # reference x -> unit u = (x+1)/2 -> cell y = corner + M u / m
    A = np.array([M / (2 * m) for M in local])
    shift = np.array([M.sum(axis=1) / (2 * m) for M in local])
    n_local = len(local)
    A_all = np.tile(A, (len(corners), 1, 1))
    b_all = np.repeat(corners, n_local, axis=0) + np.tile(shift, (len(corners), 1))
    return Grid4(kind, m, A_all, b_all)


def locate(grid: Grid4, points):
    """Index of the cell containing each point, half-open convention.

    Subcube index is ``floor(m y)`` (clipped at the top face).  Within a
    subcube, ties in the coordinate ordering go to the lower axis index.
    """
    y = np.atleast_2d(np.asarray(points, float))
    m = grid.m
    cube = np.clip(np.floor(y * m).astype(int), 0, m - 1)
    cube_id = np.ravel_multi_index(cube.T, (m,) * 4)
    if grid.kind is TESSERACT:
        return cube_id
    local = y * m - cube
    dim = 4 if grid.kind is PENTATOPE else 3
    perms = {p: i for i, p in enumerate(itertools.permutations(range(dim)))}
    order = np.argsort(-local[:, :dim], axis=1, kind="stable")
    perm_id = np.array([perms[tuple(o)] for o in order])
    return cube_id * len(perms) + perm_id


def cells_containing(grid: Grid4, point, tol=0.0):
    """All cells whose closed region holds ``point`` (brute force)."""
    x = np.einsum("cij,cj->ci", np.linalg.inv(grid.A), np.asarray(point, float) - grid.b)
    return np.flatnonzero(contains(grid.kind, x, tol))


def grid_integrate(grid: Grid4, rule: QuadratureRule, f, chunk: int = 4096,
                   extended=False):
    """Sum of the affinely mapped rule over all grid cells.

    ``f`` maps an (n, 4) array of unit-cube points to n values.  Partial sums
    are formed per chunk of cells and combined with an exactly rounded sum.
    """
    if rule.kind is not grid.kind:
        raise ParameterError(f"rule for {rule.kind} used on a {grid.kind} grid")
    pts, wts = rule.expanded(extended)
    dets = np.abs(np.linalg.det(grid.A))
    partial = []
    for s in range(0, len(grid), chunk):
        A, b = grid.A[s:s + chunk], grid.b[s:s + chunk]
        if extended:
            A = np.vectorize(mpmath.mpf, otypes=[object])(A)
            b = np.vectorize(mpmath.mpf, otypes=[object])(b)
            y = np.einsum("cij,nj->cni", A, pts) + b[:, None, :]
            vals = f(y.reshape(-1, 4)).reshape(len(b), -1)
            d = [mpmath.mpf(v) for v in dets[s:s + chunk]]
            partial.append(sum(di * wts.dot(row) for di, row in zip(d, vals)))
        else:
            y = np.einsum("cij,nj->cni", A, pts) + b[:, None, :]
            vals = f(y.reshape(-1, 4)).reshape(len(b), -1)
            partial.append(float(dets[s:s + chunk] @ (vals @ wts)))
    return mpmath.fsum(partial) if extended else math.fsum(partial)


def _g_terms(y):
    x1, x2, x3, x4 = (y[:, k] for k in range(4))
    return x1 ** 2 + 2 * x2 ** 3 + 3 * x3 ** 4 + 4 * x4 ** 5


def f1(y):
    y = np.asarray(y)
    if is_extended(y):
        return np.array([mpmath.exp(v) for v in _g_terms(y)], dtype=object)
    return np.exp(_g_terms(y))


def f2(y):
    y = np.asarray(y)
    if is_extended(y):
        return np.array([mpmath.sin(v) for v in _g_terms(y)], dtype=object)
    return np.sin(_g_terms(y))


def f3(y):
    y = np.asarray(y)
    s = (y ** 2).sum(axis=1)
    if is_extended(y):
        return np.array([mpmath.sin(v) for v in s], dtype=object)
    return np.sin(s)


FUNCTIONS = {"f1": f1, "f2": f2, "f3": f3}
_TERMS = {"f1": [(1, 2), (2, 3), (3, 4), (4, 5)], "f2": [(1, 2), (2, 3), (3, 4), (4, 5)],
          "f3": [(1, 2)] * 4}


@lru_cache(maxsize=None)
def reference_integral(f_id: str):
    """Integral of f1, f2 or f3 over [0, 1]^4 as an mpf."""
    if f_id not in FUNCTIONS:
        raise ParameterError(f"unknown function {f_id!r}")
    factors = []
    for c, n in _TERMS[f_id]:
        if f_id == "f1":
            factors.append(mpmath.quad(lambda x: mpmath.exp(c * x ** n), [0, 1]))
        else:
            factors.append(mpmath.quad(lambda x: mpmath.expj(c * x ** n), [0, 1]))
    prod = mpmath.fprod(factors)
    return prod if f_id == "f1" else mpmath.im(prod)


@dataclass
class ConvergenceSeries:
    element: ElementKind
    strength: int
    f_id: str
    ms: list
    hs: list
    Js: list
    J_inf: float
    errors: list
    slope: float | None

    def csv_rows(self):
        for m, h, J, e in zip(self.ms, self.hs, self.Js, self.errors):
            yield (str(self.element), self.strength, m, _fmt(h), _fmt(J),
                   _fmt(self.J_inf), _fmt(e))


def fit_slope(hs, errors, floor=1e-11):
    """Least-squares slope of log(error) against log(h) over the finest half.

    Returns ``None`` when every error in that half sits at the rounding floor.
    """
    n = len(hs)
    if n < 2:
        return None
    k = max(2, math.ceil(n / 2))
    h = np.asarray(hs[-k:], float)
    e = np.asarray(errors[-k:], float)
    if np.all(e <= floor):
        return None
    e = np.maximum(e, 1e-300)
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])


def convergence_experiment(kind, rules, f_id: str, m_list, extended=False):
    """Percent error against h for each rule; returns one series per rule."""
    from .rules import get_rule

    kind = ElementKind.parse(kind)
    f = FUNCTIONS.get(f_id)
    if f is None:
        raise ParameterError(f"unknown function {f_id!r}")
    J_inf = reference_integral(f_id)
    out = []
    for r in rules:
        rule = r if isinstance(r, QuadratureRule) else get_rule(kind, r)
        hs, Js, errs = [], [], []
        for m in m_list:
            grid = kuhn_freudenthal(kind, m)
            J = grid_integrate(grid, rule, f, extended=extended)
            hs.append(grid.h)
            Js.append(J)
            errs.append(percent_error(J, J_inf))
        out.append(ConvergenceSeries(kind, rule.strength, f_id, list(m_list), hs, Js,
                                     float(J_inf), errs, fit_slope(hs, errs)))
    return out


def _fmt(v) -> str:
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 20)
    return repr(float(v))


def write_csv(rows, destination):
    """Write rows (tuples in :data:`CSV_COLUMNS` order) with a header line."""
    own = not hasattr(destination, "write")
    fh = open(destination, "w", newline="") if own else destination
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow(row)
    finally:
        if own:
            fh.close()
