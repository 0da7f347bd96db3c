"""One-dimensional Jacobi polynomials and Gauss-Legendre rules.

Every routine here works in two precisions.  Plain floats and float64
arrays give double precision; :class:`mpmath.mpf` scalars or object arrays
of them give extended precision (see :data:`EXTENDED_DPS`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

#: Decimal digits carried by the extended-precision mode.
EXTENDED_DPS = 40

mpmath.mp.dps = max(mpmath.mp.dps, EXTENDED_DPS)


class ParameterError(ValueError):
    """Raised for out-of-range arguments."""


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ParameterError(
                f"Jacobi exponents must exceed -1, got ({self.alpha}, {self.beta})")


@dataclass(frozen=True)
class GaussRule1D:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)


def is_extended(x) -> bool:
    """True if ``x`` carries mpmath numbers."""
    if isinstance(x, mpmath.mpf):
        return True
    return isinstance(x, np.ndarray) and x.dtype == object


def _check(n, alpha, beta):
    if n < 0 or int(n) != n:
        raise ParameterError(f"degree must be a non-negative integer, got {n}")
    JacobiParams(alpha, beta)


def _as_array(x):
    if isinstance(x, np.ndarray):
        return x
    if isinstance(x, (list, tuple)):
        arr = np.asarray(x)
        if arr.dtype == object:
            return arr
        return arr.astype(float)
    return x


def _jacobi_rows(nmax, alpha, beta, x):
    """Yield P_0..P_nmax at ``x`` via the three-term recurrence."""
    ext = is_extended(x)
    num = mpmath.mpf if ext else float
    a, b = num(alpha), num(beta)
    one = x * 0 + 1
    p_prev = one
    yield p_prev
    if nmax == 0:
        return
    p = (a - b + (a + b + 2) * x) / 2
    yield p
    apb = a + b
    for k in range(2, nmax + 1):
        k = num(k)
        a1 = 2 * k * (k + apb) * (2 * k + apb - 2)
        a2 = (2 * k + apb - 1) * (a * a - b * b)
        a3 = (2 * k + apb - 2) * (2 * k + apb - 1) * (2 * k + apb)
        a4 = 2 * (k + a - 1) * (k + b - 1) * (2 * k + apb)
        p, p_prev = ((a2 + a3 * x) * p - a4 * p_prev) / a1, p
        yield p


def jacobi_eval(n, alpha, beta, x):
    """Evaluate the classical Jacobi polynomial P_n^(alpha, beta) at ``x``."""
    _check(n, alpha, beta)
    x = _as_array(x)
    for k, p in enumerate(_jacobi_rows(n, alpha, beta, x)):
        if k == n:
            return p


def log_norm(n, alpha, beta, extended=False):
    """Log of the squared weighted L2 norm of P_n^(alpha, beta) on [-1, 1]."""
    if extended:
        lg, log, mp = mpmath.loggamma, mpmath.log, mpmath.mpf
        alpha, beta = mp(alpha), mp(beta)
    else:
        lg, log = math.lgamma, math.log
    val = ((alpha + beta + 1) * log(2) - log(2 * n + alpha + beta + 1)
           + lg(n + alpha + 1) + lg(n + beta + 1)
           - lg(n + 1) - lg(n + alpha + beta + 1))
    return val


def norm_factor(n, alpha, beta, extended=False):
    """1/||P_n^(alpha, beta)||, evaluated in log space."""
    if extended:
        return mpmath.exp(-log_norm(n, alpha, beta, True) / 2)
    return math.exp(-log_norm(n, alpha, beta) / 2)


def jacobi_orthonormal_eval(n, alpha, beta, x):
    """Evaluate the orthonormal Jacobi polynomial on [-1, 1].

    The result has unit norm under the weight (1-x)^alpha (1+x)^beta.
    """
    _check(n, alpha, beta)
    x = _as_array(x)
    return jacobi_eval(n, alpha, beta, x) * norm_factor(n, alpha, beta, is_extended(x))


def jacobi_orthonormal_all(nmax, alpha, beta, x):
    """All orthonormal Jacobi polynomials of degree <= nmax, stacked on axis 0."""
    _check(nmax, alpha, beta)
    x = _as_array(x)
    ext = is_extended(x)
    rows = [p * norm_factor(k, alpha, beta, ext)
            for k, p in enumerate(_jacobi_rows(nmax, alpha, beta, x))]
    if isinstance(x, np.ndarray):
        return np.stack(rows)
    return rows


def _legendre_and_derivative(n, x):
    p0, p1 = x * 0 + 1, x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    if n == 0:
        return p0, x * 0
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


@lru_cache(maxsize=None)
def _gauss_legendre_double(npts):
    i = np.arange(1, npts + 1)
    x = -np.cos(np.pi * (i - 0.25) / (npts + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(npts, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-16 * max(1.0, np.max(np.abs(x))):
            break
    p, dp = _legendre_and_derivative(npts, x)
    w = 2 / ((1 - x * x) * dp * dp)
    # Enforce exact mirror symmetry.
    x = (x - x[::-1]) / 2
    w = (w + w[::-1]) / 2
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def _gauss_legendre_extended(npts, dps):
    x0, _ = _gauss_legendre_double(npts)
    with mpmath.workdps(dps + 10):
        eps = mpmath.mpf(10) ** (-(dps + 5))
        nodes, weights = [], []
        for guess in x0:
            x = mpmath.mpf(guess)
            for _ in range(100):
                p, dp = _legendre_and_derivative(npts, x)
                dx = p / dp
                x -= dx
                if abs(dx) < eps:
                    break
            p, dp = _legendre_and_derivative(npts, x)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    with mpmath.workdps(dps):
        nodes = [+v for v in nodes]
        weights = [+v for v in weights]
    n = np.array(nodes, dtype=object)
    w = np.array(weights, dtype=object)
    n = (n - n[::-1]) / 2
    w = (w + w[::-1]) / 2
    n.setflags(write=False)
    w.setflags(write=False)
    return n, w


def gauss_legendre(npts: int, extended: bool = False) -> GaussRule1D:
    """Gauss-Legendre rule with ``npts`` nodes on [-1, 1].

    Nodes come from Newton iteration on the Legendre recurrence seeded with
    Chebyshev-like guesses; the rule is exact for degree ``2*npts - 1``.
    """
    if not (1 <= int(npts) <= 64) or int(npts) != npts:
        raise ParameterError(f"npts must be in [1, 64], got {npts}")
    if npts == 1:
        if extended:
            return GaussRule1D(np.array([mpmath.mpf(0)], dtype=object),
                               np.array([mpmath.mpf(2)], dtype=object))
        return GaussRule1D(np.zeros(1), np.full(1, 2.0))
    if extended:
        return GaussRule1D(*_gauss_legendre_extended(int(npts), EXTENDED_DPS))
    return GaussRule1D(*_gauss_legendre_double(int(npts)))
