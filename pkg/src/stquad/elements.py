"""Reference geometry of the tesseract, tetrahedral prism and pentatope.

Two frames are supported.  The *reference* frame uses the [-1, 1]-based
domains (volumes 16, 8/3 and 2/3).  The *unit* frame uses [0, 1]-based
domains (volumes 1, 1/6, 1/24).  The two are related by ``x = 2u - 1`` on
every axis; for the simplex-type elements this sends the unit vertices
0, e1, e2, ... onto the columns of the barycentric matrices below, in order.

In both frames the tetrahedral prism is extruded along x4.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath
import numpy as np

from .jacobi import ParameterError, is_extended


class DomainError(ValueError):
    """A point lies outside the element it is meant to live in."""


class UnsupportedKindError(ValueError):
    """The operation is not defined for this element kind."""


class ElementKind(enum.Enum):
    TESSERACT = "tesseract"
    TETPRISM = "tetprism"
    PENTATOPE = "pentatope"

    @classmethod
    def parse(cls, value) -> "ElementKind":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "").replace("_", "").replace(" ", "")
        aliases = {"tetrahedralprism": "tetprism", "prism": "tetprism",
                   "4simplex": "pentatope", "simplex": "pentatope",
                   "hypercube": "tesseract", "4cube": "tesseract"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ParameterError(f"unknown element kind {value!r}") from None

    def __str__(self):
        return self.value


class Variant(enum.Enum):
    REFERENCE = "reference"
    UNIT = "unit"

    @classmethod
    def parse(cls, value) -> "Variant":
        return value if isinstance(value, cls) else cls(str(value).lower())


TESSERACT, TETPRISM, PENTATOPE = ElementKind

_UNIT_VOLUME = {
    TESSERACT: Fraction(1),
    TETPRISM: Fraction(1, 6),
    PENTATOPE: Fraction(1, 24),
}

#: Barycentric -> Cartesian matrices; columns are element vertices.
PENTATOPE_BARY = np.array([
    [-1, 1, -1, -1, -1],
    [-1, -1, 1, -1, -1],
    [-1, -1, -1, 1, -1],
    [-1, -1, -1, -1, 1],
], dtype=float)

TETPRISM_BARY = np.array([
    [-1, 1, -1, -1, 0],
    [-1, -1, 1, -1, 0],
    [-1, -1, -1, 1, 0],
    [0, 0, 0, 0, 1],
], dtype=float)


def volume_exact(kind, variant="reference") -> Fraction:
    kind, variant = ElementKind.parse(kind), Variant.parse(variant)
    vol = _UNIT_VOLUME[kind]
    return vol * 16 if variant is Variant.REFERENCE else vol


def volume(kind, variant="reference") -> float:
    """Element volume: 16, 8/3, 2/3 (reference) or 1, 1/6, 1/24 (unit)."""
    return float(volume_exact(kind, variant))


def vertices(kind, variant="reference") -> np.ndarray:
    """Vertex coordinates, one row per vertex."""
    kind, variant = ElementKind.parse(kind), Variant.parse(variant)
    if kind is TESSERACT:
        v = np.array([[(i >> k) & 1 for k in range(4)] for i in range(16)], float)
        v = 2 * v - 1
    elif kind is PENTATOPE:
        v = PENTATOPE_BARY.T.copy()
    else:
        tet = TETPRISM_BARY[:3, :4].T
        v = np.vstack([np.column_stack([tet, np.full(4, -1.0)]),
                       np.column_stack([tet, np.full(4, 1.0)])])
    return v if variant is Variant.REFERENCE else (v + 1) / 2


def to_unit(points):
    """Map reference-frame points to the unit frame."""
    return (np.asarray(points) + 1) / 2


def to_reference(points):
    """Map unit-frame points to the reference frame."""
    return 2 * np.asarray(points) - 1


def _as_points(p):
    arr = np.asarray(p)
    if arr.dtype != object:
        arr = arr.astype(float)
    if arr.shape[-1] != 4:
        raise ParameterError(f"points must have 4 coordinates, got shape {arr.shape}")
    return arr


def contains(kind, points, tol: float = 0.0, variant="reference"):
    """Test whether points satisfy the element's bounding inequalities.

    Returns a bool for a single point and a boolean array otherwise.
    """
    if tol < 0:
        raise ParameterError("tol must be non-negative")
    kind, variant = ElementKind.parse(kind), Variant.parse(variant)
    x = _as_points(points)
    if variant is Variant.UNIT:
        x = 2 * x - 1
        tol = 2 * tol
    x = x.astype(float) if x.dtype == object else x
    x1, x2, x3, x4 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    if kind is TESSERACT:
        ok = np.all(np.abs(x) <= 1 + tol, axis=-1)
    elif kind is TETPRISM:
        ok = ((x1 >= -1 - tol) & (x2 >= -1 - tol) & (x3 >= -1 - tol)
              & (x1 + x2 + x3 <= -1 + tol) & (np.abs(x4) <= 1 + tol))
    else:
        ok = np.all(x >= -1 - tol, axis=-1) & (x.sum(axis=-1) <= -2 + tol)
    return bool(ok) if np.ndim(ok) == 0 else ok


def bary_to_cart(kind, lambdas):
    """Map barycentric coordinates to reference Cartesian coordinates.

    For the pentatope ``lambdas`` holds five barycentric weights; for the
    tetrahedral prism it holds four weights followed by x4.
    """
    kind = ElementKind.parse(kind)
    if kind is TESSERACT:
        raise UnsupportedKindError("the tesseract has no barycentric coordinates")
    lam = np.asarray(lambdas)
    if lam.dtype != object:
        lam = lam.astype(float)
    if lam.shape[-1] != 5:
        raise ParameterError("expected 5 barycentric entries")
    mat = PENTATOPE_BARY if kind is PENTATOPE else TETPRISM_BARY
    if lam.dtype == object:
        mat = mat.astype(int).astype(object)
    return lam @ mat.T


def cart_to_bary(kind, points):
    """Inverse of :func:`bary_to_cart`."""
    kind = ElementKind.parse(kind)
    if kind is TESSERACT:
        raise UnsupportedKindError("the tesseract has no barycentric coordinates")
    x = _as_points(points).astype(float)
    u = (x + 1) / 2
    if kind is PENTATOPE:
        lam0 = 1 - u.sum(axis=-1, keepdims=True)
        return np.concatenate([lam0, u], axis=-1)
    lam0 = 1 - u[..., :3].sum(axis=-1, keepdims=True)
    return np.concatenate([lam0, u[..., :3], x[..., 3:]], axis=-1)


@lru_cache(maxsize=None)
def _unit_monomial(kind, r, s, t, v) -> Fraction:
    if kind is TESSERACT:
        return Fraction(1, (r + 1) * (s + 1) * (t + 1) * (v + 1))
    if kind is TETPRISM:
        # x4 is the extruded axis.
        return Fraction(factorial(r) * factorial(s) * factorial(t),
                        (v + 1) * factorial(r + s + t + 3))
    return Fraction(factorial(r) * factorial(s) * factorial(t) * factorial(v),
                    factorial(r + s + t + v + 4))


def _shifted(n):
    """Integer coefficients g[a] = a! * [u^a] (2u - 1)^n."""
    return [comb(n, a) * 2 ** a * (-1) ** (n - a) * factorial(a) for a in range(n + 1)]


def _convolve(*seqs):
    out = [1]
    for q in seqs:
        nxt = [0] * (len(out) + len(q) - 1)
        for i, x in enumerate(out):
            for j, y in enumerate(q):
                nxt[i + j] += x * y
        out = nxt
    return out


def _simplex_sum(coeffs, offset):
    """sum_n coeffs[n] / (n + offset)! as an exact fraction."""
    top = factorial(len(coeffs) - 1 + offset)
    num = sum(c * (top // factorial(n + offset)) for n, c in enumerate(coeffs))
    return Fraction(num, top)


@lru_cache(maxsize=None)
def _reference_monomial(kind, r, s, t, v) -> Fraction:
    # x = 2u - 1 and dx = 16 du.  The unit integrals depend on the exponents
    # only through factorials and their sum, so the binomial expansion reduces
    # to integer convolutions grouped by total degree.
    if kind is TESSERACT:
        total = Fraction(1)
        for n in (r, s, t, v):
            total *= sum(Fraction(c, factorial(a) * (a + 1)) for a, c in enumerate(_shifted(n)))
        return 16 * total
    if kind is TETPRISM:
        simplex = _simplex_sum(_convolve(_shifted(r), _shifted(s), _shifted(t)), 3)
        ext = sum(Fraction(c, factorial(d) * (d + 1)) for d, c in enumerate(_shifted(v)))
        return 16 * simplex * ext
    return 16 * _simplex_sum(_convolve(_shifted(r), _shifted(s), _shifted(t), _shifted(v)), 4)


def monomial_integral(kind, r, s, t, v, variant="reference", exact=False,
                      extended=False):
    """Exact integral of x1^r x2^s x3^t x4^v over the element.

    Computed in rational arithmetic; returned as a Fraction (``exact``), an
    mpf (``extended``) or a float.
    """
    kind, variant = ElementKind.parse(kind), Variant.parse(variant)
    r, s, t, v = (int(e) for e in (r, s, t, v))
    if min(r, s, t, v) < 0:
        raise ParameterError("exponents must be non-negative")
    if r + s + t + v > 40:
        raise ParameterError("total degree above 40 is not supported")
    if variant is Variant.UNIT:
        val = _unit_monomial(kind, r, s, t, v)
    else:
        val = _reference_monomial(kind, r, s, t, v)
    if exact:
        return val
    if extended:
        return mpmath.mpf(val.numerator) / val.denominator
    return val.numerator / val.denominator


def monomial_exponents(max_degree: int):
    """All (r, s, t, v) with r+s+t+v <= max_degree, graded then lexicographic."""
    out = []
    for deg in range(max_degree + 1):
        for r in range(deg, -1, -1):
            for s in range(deg - r, -1, -1):
                for t in range(deg - r - s, -1, -1):
                    out.append((r, s, t, deg - r - s - t))
    return out


def eval_monomials(points, exponents):
    """Matrix of monomial values, shape (n_points, n_exponents)."""
    x = np.asarray(points)
    if x.dtype != object:
        x = x.astype(float)
    exps = np.asarray(exponents, dtype=int)
    if is_extended(x):
        maxdeg = int(exps.max()) if exps.size else 0
        pw = [[x[:, k] ** e for e in range(maxdeg + 1)] for k in range(4)]
        cols = [pw[0][r] * pw[1][s] * pw[2][t] * pw[3][v] for r, s, t, v in exps]
        return np.stack(cols, axis=1)
    return np.prod(x[:, None, :] ** exps[None, :, :], axis=-1)


def sample_points(kind, n: int, rng, variant="reference") -> np.ndarray:
    """Draw ``n`` points uniformly from the element."""
    kind, variant = ElementKind.parse(kind), Variant.parse(variant)
    if kind is TESSERACT:
        u = rng.uniform(0.0, 1.0, size=(n, 4))
    elif kind is PENTATOPE:
        u = rng.dirichlet(np.ones(5), size=n)[:, 1:]
    else:
        u = np.column_stack([rng.dirichlet(np.ones(4), size=n)[:, 1:],
                             rng.uniform(0.0, 1.0, size=n)])
    return u if variant is Variant.UNIT else 2 * u - 1
