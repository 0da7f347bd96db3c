from fractions import Fraction

import numpy as np
import pytest

from stquad.duffy import duffy_points, duffy_rule
from stquad.elements import (PENTATOPE, TESSERACT, TETPRISM, ElementKind,
                             UnsupportedKindError, bary_to_cart, cart_to_bary, contains,
                             monomial_exponents, monomial_integral, sample_points,
                             to_reference, to_unit, vertices, volume)
from stquad.jacobi import ParameterError

KINDS = list(ElementKind)


def test_volumes():
    assert volume("tesseract") == 16
    assert volume("pentatope") == pytest.approx(2 / 3, abs=1e-15)
    assert volume("tetprism") == pytest.approx(8 / 3, abs=1e-15)
    assert volume("pentatope", "unit") == pytest.approx(1 / 24, abs=1e-16)
    assert volume("tetprism", "unit") == pytest.approx(1 / 6, abs=1e-16)
    assert volume("tesseract", "unit") == 1


def test_kind_parsing():
    assert ElementKind.parse("Tet-Prism") is TETPRISM
    assert ElementKind.parse("4-simplex") is PENTATOPE
    with pytest.raises(ParameterError):
        ElementKind.parse("hexagon")


def test_contains_examples():
    assert contains(PENTATOPE, [-0.6] * 4, 0)
    assert not contains(TESSERACT, [1.0001, 0, 0, 0], 1e-8)
    assert np.all(contains(TETPRISM, vertices(TETPRISM), 1e-12))
    assert contains(PENTATOPE, [0.0, 0.0, -1.0, -1.0], 1e-12)
    assert not contains(PENTATOPE, [0.0, 0.1, -1.0, -1.0], 1e-12)


def test_contains_rejects_negative_tol():
    with pytest.raises(ParameterError):
        contains(TESSERACT, [0, 0, 0, 0], -1)


def test_tetprism_spec_inequalities(rng):
    # x2, x3 >= -1, x2 + x3 <= 0, x1 >= -1, x1 + x2 + x3 <= -1, |x4| <= 1
    x = rng.uniform(-1.2, 1.2, size=(5000, 4))
    x1, x2, x3, x4 = x.T
    ref = ((x2 >= -1) & (x3 >= -1) & (x2 + x3 <= 0) & (x1 >= -1)
           & (x1 + x2 + x3 <= -1) & (np.abs(x4) <= 1))
    assert np.array_equal(contains(TETPRISM, x), ref)


def test_bary_to_cart_examples():
    assert np.allclose(bary_to_cart(PENTATOPE, [0, 1, 0, 0, 0]), [1, -1, -1, -1])
    assert np.allclose(bary_to_cart(PENTATOPE, [0.2] * 5), [-0.6] * 4)
    assert np.allclose(bary_to_cart(TETPRISM, [1, 0, 0, 0, 0.5]), [-1, -1, -1, 0.5])
    with pytest.raises(UnsupportedKindError):
        bary_to_cart(TESSERACT, [1, 0, 0, 0, 0])


def test_bary_round_trip(rng):
    for kind in (PENTATOPE, TETPRISM):
        pts = sample_points(kind, 50, rng)
        assert np.allclose(bary_to_cart(kind, cart_to_bary(kind, pts)), pts, atol=1e-14)


def test_unit_reference_round_trip(rng):
    x = rng.uniform(-1, 1, size=(100, 4))
    assert np.abs(to_reference(to_unit(x)) - x).max() < 1e-14
    for kind in KINDS:
        assert np.all(contains(kind, vertices(kind, "unit"), 0, variant="unit"))


def test_monomial_integral_unit_examples():
    assert monomial_integral(PENTATOPE, 0, 0, 0, 0, "unit", exact=True) == Fraction(1, 24)
    assert monomial_integral(TESSERACT, 2, 0, 0, 0, "unit", exact=True) == Fraction(1, 3)
    assert monomial_integral(TESSERACT, 1, 0, 0, 0) == 0


def test_monomial_integral_limits():
    with pytest.raises(ParameterError):
        monomial_integral(PENTATOPE, 41, 0, 0, 0)
    assert np.isfinite(monomial_integral(PENTATOPE, 10, 10, 10, 10))


def test_reference_pentatope_x4_against_duffy():
    pts, w = duffy_points(PENTATOPE, 10)
    oracle = np.sum(w * pts[:, 3])
    assert monomial_integral(PENTATOPE, 0, 0, 0, 1) == pytest.approx(oracle, abs=1e-13)
    assert monomial_integral(PENTATOPE, 0, 0, 0, 1, exact=True) == Fraction(-2, 5)


def test_tetprism_unit_convention_extruded_x4():
    # x4 is the extruded axis: the unit formula r!s!t!/((v+1)(r+s+t+3)!).
    pts, w = duffy_points(TETPRISM, 8)
    u = to_unit(pts)
    wu = w / 16
    for e in [(2, 0, 0, 0), (0, 0, 0, 2), (1, 2, 0, 3), (0, 3, 1, 1)]:
        oracle = np.sum(wu * np.prod(u ** np.array(e), axis=1))
        assert monomial_integral(TETPRISM, *e, variant="unit") == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_reference_integrals_match_duffy_to_degree_12(kind):
    pts, w = duffy_points(kind, 7)
    exps = monomial_exponents(12)
    vals = np.prod(pts[:, None, :] ** np.array(exps)[None], axis=-1)
    quad = w @ vals
    exact = np.array([monomial_integral(kind, *e) for e in exps])
    assert np.abs(quad - exact).max() < 1e-12 * max(1, np.abs(exact).max())


def test_duffy_tesseract_two_points():
    r = duffy_rule(TESSERACT, 2)
    assert r.n_points == 16
    assert abs(r.integrate(lambda x: np.prod(x ** 3, axis=1))) < 1e-15
    assert r.integrate(lambda x: np.prod(x ** 2, axis=1)) == pytest.approx((2 / 3) ** 4, abs=1e-14)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_duffy_weight_sum_and_containment(kind, n):
    r = duffy_rule(kind, n)
    pts, w = r.expanded()
    assert abs(w.sum() - volume(kind)) < 1e-13
    assert np.all(contains(kind, pts, 1e-12))
    assert np.all(w > 0)


def test_duffy_pentatope_8_matches_closed_form():
    pts, w = duffy_points(PENTATOPE, 8)
    for e in monomial_exponents(7):
        q = np.sum(w * np.prod(pts ** np.array(e), axis=1))
        assert abs(q - monomial_integral(PENTATOPE, *e)) < 1e-12


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("n", [1, 3])
def test_duffy_exact_to_2n_minus_1(kind, n):
    pts, w = duffy_points(kind, n)
    for e in monomial_exponents(2 * n - 1):
        q = np.sum(w * np.prod(pts ** np.array(e), axis=1))
        assert abs(q - monomial_integral(kind, *e)) < 1e-13


def test_duffy_range():
    for bad in (0, 21):
        with pytest.raises(ParameterError):
            duffy_rule(PENTATOPE, bad)


def test_duffy_extended():
    pts, w = duffy_points(PENTATOPE, 4, extended=True)
    assert abs(sum(w) - monomial_integral(PENTATOPE, 0, 0, 0, 0, extended=True)) < 1e-35


@pytest.mark.parametrize("kind", KINDS)
def test_sample_points_inside(kind, rng):
    assert np.all(contains(kind, sample_points(kind, 200, rng)))
