"""Symmetry orbits of the three reference elements.

Each orbit family is described by a *seed pattern*: a tuple of entries, each
an affine form ``c + sum_k a_k p_k`` in the family parameters.  For the
tesseract the entries are Cartesian coordinates; for the tetrahedral prism
they are four barycentric weights followed by x4; for the pentatope they are
five barycentric weights.  The symmetry group acts on the entries, and the
distinct images of the pattern (compared exactly, as forms) give the orbit.
Because every image is an affine form, the expanded Cartesian points are
affine in the parameters: ``points = offset + slope @ params``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .elements import (PENTATOPE, PENTATOPE_BARY, TESSERACT, TETPRISM,
                       TETPRISM_BARY, DomainError, ElementKind, bary_to_cart)
from .jacobi import ParameterError

F = Fraction


def _form(const=0, *coeffs):
    return (F(const),) + tuple(F(c) for c in coeffs)


def _neg(form):
    return tuple(-c for c in form)


def _pad(form, n):
    return form + (F(0),) * (n + 1 - len(form))


# Seed patterns in published family order.  Parameter names: a, b, g, d.
_a, _b, _g, _d = (_form(0, 1), _form(0, 0, 1), _form(0, 0, 0, 1), _form(0, 0, 0, 0, 1))
_zero = _form(0)

_TESSERACT_SEEDS = [
    (_zero, _zero, _zero, _zero),
    (_a, _zero, _zero, _zero),
    (_a, _a, _zero, _zero),
    (_a, _b, _zero, _zero),
    (_a, _a, _a, _zero),
    (_a, _a, _b, _zero),
    (_a, _b, _g, _zero),
    (_a, _a, _a, _a),
    (_a, _a, _a, _b),
    (_a, _a, _b, _b),
    (_a, _a, _b, _g),
    (_a, _b, _g, _d),
]

_q = _form(F(1, 4))


def _tp(lams, extrude):
    return tuple(lams) + (extrude,)


# In the prism, the extrusion parameter is always the last one.
_TETPRISM_SEEDS = [
    _tp([_q] * 4, _zero),
    _tp([_q] * 4, _form(0, 1)),
    _tp([_a, _a, _a, _form(1, -3)], _zero),
    _tp([_a, _a, _a, _form(1, -3)], _b),
    _tp([_a, _a, _form(F(1, 2), -1), _form(F(1, 2), -1)], _zero),
    _tp([_a, _a, _form(F(1, 2), -1), _form(F(1, 2), -1)], _b),
    _tp([_a, _a, _b, _form(1, -2, -1)], _zero),
    _tp([_a, _a, _b, _form(1, -2, -1)], _g),
    _tp([_a, _b, _g, _form(1, -1, -1, -1)], _zero),
    _tp([_a, _b, _g, _form(1, -1, -1, -1)], _d),
]

_PENTATOPE_SEEDS = [
    (_form(F(1, 5)),) * 5,
    (_a, _a, _a, _a, _form(1, -4)),
    (_a, _a, _a, _form(F(1, 2), F(-3, 2)), _form(F(1, 2), F(-3, 2))),
    (_a, _a, _a, _b, _form(1, -3, -1)),
    (_a, _a, _b, _b, _form(1, -2, -2)),
    (_a, _a, _b, _g, _form(1, -2, -1, -1)),
    (_a, _b, _g, _d, _form(1, -1, -1, -1, -1)),
]

_SEEDS = {TESSERACT: _TESSERACT_SEEDS, TETPRISM: _TETPRISM_SEEDS,
          PENTATOPE: _PENTATOPE_SEEDS}

_N_PARAMS = {
    TESSERACT: (0, 1, 1, 2, 1, 2, 3, 1, 2, 2, 3, 4),
    TETPRISM: (0, 1, 1, 2, 1, 2, 2, 3, 3, 4),
    PENTATOPE: (0, 1, 1, 2, 2, 3, 4),
}


def group_actions(kind):
    """Yield the element's symmetry group as functions on seed entries."""
    kind = ElementKind.parse(kind)
    if kind is TESSERACT:
        for perm in itertools.permutations(range(4)):
            for signs in itertools.product((1, -1), repeat=4):
                yield lambda e, p=perm, s=signs: tuple(
                    e[p[k]] if s[k] > 0 else _neg(e[p[k]]) for k in range(4))
    elif kind is TETPRISM:
        for perm in itertools.permutations(range(4)):
            for flip in (1, -1):
                yield lambda e, p=perm, f=flip: tuple(e[p[k]] for k in range(4)) + (
                    e[4] if f > 0 else _neg(e[4]),)
    else:
        for perm in itertools.permutations(range(5)):
            yield lambda e, p=perm: tuple(e[p[k]] for k in range(5))


def group_order(kind) -> int:
    return {TESSERACT: 384, TETPRISM: 48, PENTATOPE: 120}[ElementKind.parse(kind)]


@dataclass(frozen=True)
class OrbitFamily:
    """One symmetry orbit family, e.g. pentatope S4(alpha, beta)."""

    kind: ElementKind
    family_id: int
    n_params: int
    cardinality: int
    images: tuple = field(repr=False, compare=False)

    @property
    def name(self) -> str:
        return f"S{self.family_id}"

    @property
    def barycentric(self) -> bool:
        return self.kind is not TESSERACT

    @property
    def box_params(self) -> tuple:
        """Indices of parameters constrained only to [0, 1]."""
        if self.kind is TESSERACT:
            return tuple(range(self.n_params))
        if self.kind is TETPRISM and self.family_id % 2 == 0:
            return (self.n_params - 1,)
        return ()

    @lru_cache(maxsize=None)
    def affine_map(self):
        """Return ``(offset, slope)`` with points = offset + slope @ params.

        ``offset`` has shape (cardinality, 4); ``slope`` has shape
        (cardinality, 4, n_params).
        """
        n = self.n_params
        entries = np.array([[[float(c) for c in _pad(e, n)] for e in img]
                            for img in self.images])
        const, lin = entries[..., 0], entries[..., 1:]
        if self.kind is TESSERACT:
            return const, lin
        mat = PENTATOPE_BARY if self.kind is PENTATOPE else TETPRISM_BARY
        return const @ mat.T, np.einsum("ij,cjk->cik", mat, lin)

    def exact_affine_map(self):
        """Like :meth:`affine_map` but with Fraction entries (object arrays)."""
        n = self.n_params
        entries = np.array([[list(_pad(e, n)) for e in img] for img in self.images],
                           dtype=object)
        const, lin = entries[..., 0], entries[..., 1:]
        if self.kind is TESSERACT:
            return const, lin
        mat = (PENTATOPE_BARY if self.kind is PENTATOPE else TETPRISM_BARY)
        mat = mat.astype(int).astype(object)
        return const.dot(mat.T), np.einsum("ij,cjk->cik", mat, lin)

    def seed_entries(self, params):
        """Numeric seed entries (barycentric or Cartesian) for ``params``."""
        seed = _SEEDS[self.kind][self.family_id - 1]
        p = list(params)
        return [e[0] + sum(c * v for c, v in zip(e[1:], p)) for e in seed]

    def clamp(self, params):
        """Clamp parameters, in order, into the admissible region."""
        p = np.array(params, dtype=float).copy()
        lo, hi = self._bounds(p)
        return p if p.size == 0 else np.minimum(np.maximum(p, lo), hi)

    @lru_cache(maxsize=None)
    def _bound_table(self):
        """Float seed entries as (constants, coefficient matrix)."""
        n = self.n_params
        seed = [_pad(e, n) for e in _SEEDS[self.kind][self.family_id - 1]]
        table = np.array([[float(c) for c in e] for e in seed])
        return table[:, 0], table[:, 1:]

    def _bounds(self, p):
        """Sequential bounds; bound k depends on already-clamped p[:k]."""
        n = self.n_params
        lo, hi = np.zeros(n), np.ones(n)
        if self.kind is TESSERACT:
            return lo, hi
        const, coef = self._bound_table()
        box = self.box_params
        q = np.asarray(p, dtype=float).copy()
        for k in range(n):
            if k not in box:
                neg = coef[:, k] < 0
                if neg.any():
                    rest = const[neg] + coef[neg, :k] @ q[:k]
                    hi[k] = max(min(1.0, float(np.min(rest / -coef[neg, k]))), 0.0)
            q[k] = min(max(q[k], 0.0), hi[k])
        return lo, hi

    def sample(self, rng) -> np.ndarray:
        """Draw parameters uniformly within the sequential admissible box."""
        p = np.zeros(self.n_params)
        for k in range(self.n_params):
            lo, hi = self._bounds(p)
            p[k] = rng.uniform(lo[k], hi[k])
        return p

    def admissible(self, params, tol=1e-14) -> bool:
        p = np.asarray(params, dtype=float)
        if p.shape != (self.n_params,):
            return False
        if self.kind is TESSERACT:
            return bool(np.all((p >= -tol) & (p <= 1 + tol)))
        entries = self.seed_entries(p)
        vals = entries[:-1] if self.kind is TETPRISM else entries
        ok = all(-tol <= v <= 1 + tol for v in vals)
        if self.kind is TETPRISM:
            ok = ok and -tol <= entries[4] <= 1 + tol
        return bool(ok)

    def points(self, params):
        """All ``cardinality`` images, duplicates kept (fixed-size expansion)."""
        offset, slope = self.affine_map()
        p = np.asarray(params)
        if p.dtype == object:
            offset, slope = (_to_mpf(a) for a in self.exact_affine_map())
            return offset + slope.dot(p) if self.n_params else offset.copy()
        return offset + slope @ p.astype(float) if self.n_params else offset.copy()


_to_mpf = np.vectorize(lambda f: mpmath.mpf(f.numerator) / f.denominator,
                       otypes=[object])


def _images(kind, seed):
    seen = {}
    for act in group_actions(kind):
        img = act(seed)
        seen.setdefault(img, None)
    return tuple(seen)


@lru_cache(maxsize=None)
def orbit_families(kind) -> tuple:
    """All orbit families of the element, in published order S1, S2, ..."""
    kind = ElementKind.parse(kind)
    out = []
    for fid, (seed, npar) in enumerate(zip(_SEEDS[kind], _N_PARAMS[kind]), start=1):
        seed = tuple(_pad(e, npar) for e in seed)
        imgs = _images(kind, seed)
        out.append(OrbitFamily(kind, fid, npar, len(imgs), imgs))
    return tuple(out)


def family(kind, family_id: int) -> OrbitFamily:
    fams = orbit_families(kind)
    if not 1 <= family_id <= len(fams):
        raise ParameterError(f"{kind} has no family S{family_id}")
    return fams[family_id - 1]


def orbit_weight_multiplicity(fam: OrbitFamily) -> int:
    """Number of points sharing one weight in this family."""
    return fam.cardinality


@dataclass(frozen=True)
class OrbitInstance:
    family: OrbitFamily
    params: tuple = ()


def expand(instance: OrbitInstance, strict: bool = True, decimals: int = 14):
    """Concrete points of an orbit with numerically coincident points merged.

    With ``strict`` an out-of-range parameter raises :class:`DomainError`;
    otherwise parameters are clamped first.
    """
    fam = instance.family
    params = np.asarray(instance.params, dtype=float)
    if params.shape != (fam.n_params,):
        raise ParameterError(f"{fam.name} takes {fam.n_params} parameters")
    if not fam.admissible(params):
        if strict:
            raise DomainError(f"parameters {params} outside the {fam.name} region")
        params = fam.clamp(params)
    pts = fam.points(params)
    _, idx = np.unique(np.round(pts, decimals) + 0.0, axis=0, return_index=True)
    return pts[np.sort(idx)]


def transform_points(kind, points):
    """All images of ``points`` under the symmetry group.

    Returns an array of shape (group_order, n, 4).
    """
    kind = ElementKind.parse(kind)
    x = np.asarray(points, dtype=float)
    if kind is TESSERACT:
        out = []
        for perm in itertools.permutations(range(4)):
            for signs in itertools.product((1.0, -1.0), repeat=4):
                out.append(x[:, perm] * np.array(signs))
        return np.stack(out)
    from .elements import cart_to_bary
    lam = cart_to_bary(kind, x)
    out = []
    if kind is TETPRISM:
        for perm in itertools.permutations(range(4)):
            for flip in (1.0, -1.0):
                img = np.concatenate([lam[:, perm], flip * lam[:, 4:]], axis=1)
                out.append(bary_to_cart(kind, img))
    else:
        for perm in itertools.permutations(range(5)):
            out.append(bary_to_cart(kind, lam[:, perm]))
    return np.stack(out)
