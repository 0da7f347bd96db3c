import math

import mpmath
import numpy as np
import pytest

from stquad.jacobi import (GaussRule1D, JacobiParams, ParameterError, gauss_legendre,
                           jacobi_eval, jacobi_orthonormal_all, jacobi_orthonormal_eval)


def explicit_jacobi(n, a, b, x):
    """Closed-form sum, independent of the recurrence."""
    return sum(math.comb(n + a, n - s) * math.comb(n + b, s)
               * ((x - 1) / 2) ** s * ((x + 1) / 2) ** (n - s) for s in range(n + 1))


def test_p0_is_one():
    assert jacobi_eval(0, 1.5, 2.0, 0.37) == 1


def test_legendre_p1():
    assert jacobi_eval(1, 0, 0, 0.5) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("n,a,b,x", [(3, 2, 0, -0.25), (5, 7, 0, 0.3), (8, 1, 2, -0.9)])
def test_matches_explicit_sum(n, a, b, x):
    assert jacobi_eval(n, a, b, x) == pytest.approx(explicit_jacobi(n, a, b, x), rel=1e-13)


def test_invalid_params():
    with pytest.raises(ParameterError):
        jacobi_eval(2, -1, 0, 0.1)
    with pytest.raises(ParameterError):
        jacobi_eval(2, 0, -1.5, 0.1)
    with pytest.raises(ParameterError):
        JacobiParams(-1, 0)


def test_orthonormal_constant():
    assert jacobi_orthonormal_eval(0, 0, 0, 0.77) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_orthonormal_p2_unit_norm():
    g = gauss_legendre(5)
    v = jacobi_orthonormal_eval(2, 0, 0, g.nodes)
    assert abs(np.sum(g.weights * v * v) - 1) < 1e-14


def test_weighted_orthogonality_alpha3():
    g = gauss_legendre(12)
    p4 = jacobi_orthonormal_eval(4, 3, 0, g.nodes)
    p2 = jacobi_orthonormal_eval(2, 3, 0, g.nodes)
    assert abs(np.sum(g.weights * (1 - g.nodes) ** 3 * p4 * p2)) < 1e-14


def test_no_overflow_at_high_degree():
    v = jacobi_orthonormal_eval(40, 43, 0, np.linspace(-1, 1, 11))
    assert np.all(np.isfinite(v))


@pytest.mark.parametrize("alpha", [0, 1, 5, 13, 27, 43])
def test_gram_identity_double(alpha):
    n = 20
    g = gauss_legendre(min(64, n + alpha // 2 + 2))
    P = jacobi_orthonormal_all(n, alpha, 0, g.nodes)
    G = (P * g.weights * (1 - g.nodes) ** alpha) @ P.T
    assert np.abs(G - np.eye(n + 1)).max() < 1e-12


@pytest.mark.parametrize("alpha", [0, 9])
def test_gram_identity_extended(alpha):
    n = 8
    g = gauss_legendre(n + alpha // 2 + 2, extended=True)
    P = jacobi_orthonormal_all(n, alpha, 0, g.nodes)
    wt = g.weights * np.array([(1 - x) ** alpha for x in g.nodes], dtype=object)
    G = (P * wt).dot(P.T)
    err = max(abs(G[i, j] - (i == j)) for i in range(n + 1) for j in range(n + 1))
    assert err < 1e-28


def test_gauss_legendre_small():
    g = gauss_legendre(1)
    assert isinstance(g, GaussRule1D)
    assert list(g.nodes) == [0.0] and list(g.weights) == [2.0]
    g = gauss_legendre(2)
    assert np.allclose(g.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert np.allclose(g.weights, [1, 1], atol=1e-15)


def test_gauss_legendre_degree8():
    g = gauss_legendre(5)
    assert abs(np.sum(g.weights * g.nodes ** 8) - 2 / 9) < 1e-15


@pytest.mark.parametrize("n", [3, 10, 33, 64])
def test_gauss_legendre_invariants(n):
    g = gauss_legendre(n)
    assert np.all(np.diff(g.nodes) > 0)
    assert np.abs(g.nodes + g.nodes[::-1]).max() < 1e-15
    assert abs(g.weights.sum() - 2) < 1e-14
    assert np.all(g.weights > 0)
    k = 2 * n - 2
    assert abs(np.sum(g.weights * g.nodes ** k) - 2 / (k + 1)) < 1e-13


def test_gauss_legendre_range():
    for bad in (0, 65):
        with pytest.raises(ParameterError):
            gauss_legendre(bad)


def test_gauss_legendre_extended_precision():
    g = gauss_legendre(10, extended=True)
    assert isinstance(g.nodes[0], mpmath.mpf)
    exact = mpmath.mpf(2) / 19
    assert abs(sum(w * x ** 18 for x, w in zip(g.nodes, g.weights)) - exact) < 1e-35
