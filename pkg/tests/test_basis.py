import math
from fractions import Fraction

import numpy as np
import pytest

from stquad.basis import (MultiIndex, admissible, basis_eval, basis_set, collapsed_coords,
                          gram_matrix, n_dof, vandermonde)
from stquad.duffy import duffy_points
from stquad.elements import (PENTATOPE, TESSERACT, TETPRISM, DomainError, ElementKind,
                             monomial_integral, sample_points, vertices, volume)
from stquad.jacobi import ParameterError

KINDS = list(ElementKind)


def test_collapsed_tesseract_identity():
    assert np.allclose(collapsed_coords(TESSERACT, [0.1, 0.2, 0.3, 0.4]), [0.1, 0.2, 0.3, 0.4])


def test_collapsed_pentatope_centroid():
    assert np.allclose(collapsed_coords(PENTATOPE, [-0.6] * 4), [0, -1 / 3, -0.5, -0.6], atol=1e-15)


def test_collapsed_tetprism_singular_locus():
    a, b, c, d = collapsed_coords(TETPRISM, [-1.0, 0.0, 0.0, 0.3])
    assert a == -1 and d == 0.3


def test_collapsed_outside_raises():
    with pytest.raises(DomainError):
        collapsed_coords(PENTATOPE, [0.5, 0.5, 0.5, 0.5])


@pytest.mark.parametrize("kind", KINDS)
def test_constant_function(kind, rng):
    pts = sample_points(kind, 7, rng)
    vals = basis_eval(kind, MultiIndex(0, 0, 0, 0), pts)
    assert np.allclose(vals, 1 / math.sqrt(volume(kind)), atol=1e-14)


def test_constant_examples():
    assert basis_eval(TESSERACT, (0, 0, 0, 0), [0.1, 0, 0, 0]) == pytest.approx(0.25)
    assert basis_eval(TETPRISM, (0, 0, 0, 0), [-0.8, -0.5, -0.2, 0]) == pytest.approx(math.sqrt(3 / 8))
    assert basis_eval(PENTATOPE, (0, 0, 0, 0), [-0.6] * 4) == pytest.approx(math.sqrt(1.5))


def test_tesseract_linear():
    expect = math.sqrt(1.5) * 0.5 * (1 / math.sqrt(2)) ** 3
    assert basis_eval(TESSERACT, (1, 0, 0, 0), [0.5, 0, 0, 0]) == pytest.approx(expect, abs=1e-15)


def test_pentatope_0001_against_affine_oracle():
    # psi_0001 depends on x4 only: the unit-norm affine function orthogonal to 1.
    vol = monomial_integral(PENTATOPE, 0, 0, 0, 0, exact=True)
    m1 = monomial_integral(PENTATOPE, 0, 0, 0, 1, exact=True) / vol
    m2 = monomial_integral(PENTATOPE, 0, 0, 0, 2, exact=True) / vol
    var = m2 - m1 ** 2
    x4 = Fraction(-3, 5)
    expect = float(x4 - m1) / math.sqrt(float(vol * var))
    assert basis_eval(PENTATOPE, (0, 0, 0, 1), [-0.6] * 4) == pytest.approx(expect, abs=1e-13)


def test_inadmissible_index():
    with pytest.raises(ParameterError):
        basis_eval(PENTATOPE, (-1, 0, 0, 0), [-0.6] * 4)
    assert not admissible(PENTATOPE, (1, 1, 1, 1), 3)
    assert admissible(TETPRISM, (1, 1, 1, 3), 3)
    assert not admissible(TETPRISM, (1, 1, 2, 0), 3)
    assert admissible(TESSERACT, (3, 3, 3, 3), 3)


@pytest.mark.parametrize("kind,p,n", [(PENTATOPE, 2, 15), (TETPRISM, 1, 8), (TESSERACT, 3, 256)])
def test_basis_set_sizes(kind, p, n):
    assert len(basis_set(kind, p)) == n == n_dof(kind, p)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("p", range(0, 7))
def test_basis_set_counts_and_order(kind, p):
    bs = basis_set(kind, p)
    assert len(bs) == n_dof(kind, p)
    keys = [(idx.degree, tuple(idx)) for idx in bs.indices]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_basis_set_range():
    with pytest.raises(ParameterError):
        basis_set(PENTATOPE, 21)


@pytest.mark.parametrize("kind,p,tol", [(PENTATOPE, 3, 1e-10), (TESSERACT, 2, 1e-12), (TETPRISM, 4, 1e-9)])
def test_gram_examples(kind, p, tol):
    g = gram_matrix(kind, p, 2 * p + 6)
    assert np.abs(g - np.eye(len(g))).max() < tol


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("p", [1, 5, 6])
def test_gram_identity(kind, p):
    g = gram_matrix(kind, p, 2 * p + 4)
    assert np.abs(g - np.eye(len(g))).max() < 1e-9


def test_gram_insufficient_oracle():
    with pytest.raises(ParameterError):
        gram_matrix(PENTATOPE, 3, 9)


def _monomial_sets(kind, p):
    span = range(p + 1)
    for e in np.ndindex(*(p + 1,) * 4):
        if kind is TESSERACT and max(e) <= p:
            yield e
        elif kind is TETPRISM and sum(e[:3]) <= p and e[3] <= p:
            yield e
        elif sum(e) <= p:
            yield e


@pytest.mark.parametrize("kind", KINDS)
def test_completeness(kind, rng):
    p = 3
    idx = basis_set(kind, p).indices
    qp, qw = duffy_points(kind, p + 3)
    V = vandermonde(kind, idx, qp)
    test = sample_points(kind, 100, rng)
    Vt = vandermonde(kind, idx, test)
    for e in _monomial_sets(kind, p):
        f = np.prod(qp ** np.array(e), axis=1)
        coef = V.T @ (qw * f)
        approx = Vt @ coef
        assert np.abs(approx - np.prod(test ** np.array(e), axis=1)).max() < 1e-8


@pytest.mark.parametrize("kind", KINDS)
def test_finite_at_vertices(kind):
    V = vandermonde(kind, basis_set(kind, 4).indices, vertices(kind))
    assert np.all(np.isfinite(V))


def test_extended_matches_double(rng):
    import mpmath
    pts = sample_points(PENTATOPE, 3, rng)
    ext = np.vectorize(mpmath.mpf, otypes=[object])(pts)
    idx = basis_set(PENTATOPE, 3).indices
    a = vandermonde(PENTATOPE, idx, pts)
    b = vandermonde(PENTATOPE, idx, ext).astype(float)
    assert np.abs(a - b).max() < 1e-12
