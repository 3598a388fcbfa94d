from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlmwkb.errors import MissingDerivativeError, SingularJetError, SingularLeadingTermError, UsageError
from qlmwkb.formal_series import (
    I,
    DiffPolynomial,
    GaussRational,
    GradedSeries,
    NumericJet,
    homogeneity_signature,
    is_pure_imaginary,
    is_pure_real,
    k_deriv,
    k_power,
    parse_polynomial,
    poly_add,
    poly_diff,
    poly_eval,
    poly_mul,
    poly_to_latex,
    series_mul,
    series_reciprocal,
)

K1 = k_deriv(1)
K2 = k_deriv(2)
K3 = k_deriv(3)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussRational, small, small)
dexp = st.dictionaries(st.integers(1, 3), st.integers(1, 2), max_size=2)
monomial = st.tuples(st.tuples(st.integers(-3, 3), dexp), gauss)
polys = st.lists(monomial, max_size=4).map(lambda items: DiffPolynomial([((k, d), c) for (k, d), c in items]))


def _series(cap):
    return st.lists(polys, min_size=cap, max_size=cap).map(lambda cs: GradedSeries(cs, cap))


# -- Gaussian rationals ----------------------------------------------------------


def test_gauss_arithmetic():
    a = GaussRational(Fraction(1, 2), 3)
    assert a * a.inverse() == GaussRational(1)
    assert I * I == GaussRational(-1)
    assert (a - a) == GaussRational(0)
    assert complex(a) == complex(0.5, 3)
    assert a.conjugate() == GaussRational(Fraction(1, 2), -3)


def test_gauss_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        GaussRational(0).inverse()


# -- polynomial examples ---------------------------------------------------------


def test_add_examples():
    assert poly_add(K1, DiffPolynomial.zero()) == K1
    sq = K1 * K1
    assert poly_add(3 * sq, -3 * sq).is_zero()
    num = poly_add(3 * sq, -2 * (k_power(1) * K2))
    assert num == parse_polynomial("(3) k1^2 + (-2) k k2")


def test_mul_examples():
    ratio = K1 * k_power(-1)
    assert poly_mul(ratio, ratio) == K1 * K1 * k_power(-2)
    ik = k_power(1, I)
    assert poly_mul(ik, ik) == k_power(2, -1)
    half = K1 * k_power(-1, GaussRational(Fraction(-1, 2)))
    assert poly_mul(half, half) == K1 * K1 * k_power(-2, GaussRational(Fraction(1, 4)))


def test_diff_examples():
    assert poly_diff(k_power(1)) == K1
    num = 3 * (K1 * K1) - 2 * (k_power(1) * K2)
    assert poly_diff(num) == 4 * (K1 * K2) - 2 * (k_power(1) * K3)
    f = K1 * K1 * k_power(-1)
    assert poly_diff(f) == 2 * (K1 * K2 * k_power(-1)) - K1 * K1 * K1 * k_power(-2)


def test_eval_examples():
    assert poly_eval(K1, [2, 3]) == 3
    num = 3 * (K1 * K1) - 2 * (k_power(1) * K2)
    assert poly_eval(num, NumericJet([1, 2, 5])) == 2
    assert poly_eval(K1 * k_power(-1, GaussRational(Fraction(-1, 2))), [2, 6]) == -1.5


def test_eval_errors():
    with pytest.raises(MissingDerivativeError):
        poly_eval(K2, [1, 2])
    with pytest.raises(SingularJetError):
        poly_eval(k_power(-1), [0, 1])


def test_signature_examples():
    assert homogeneity_signature(K1 * k_power(-1)) == (0, 1)
    g2 = 3 * (K1 * K1 * k_power(-3)) - 2 * (K2 * k_power(-2))
    assert homogeneity_signature(g2) == (-1, 2)
    assert homogeneity_signature(k_power(1) + K1) == (1, "mixed")
    assert homogeneity_signature(DiffPolynomial.zero()) == (None, None)


def test_parity_predicates():
    assert is_pure_imaginary(k_power(1, I))
    assert not is_pure_real(k_power(1, I))
    assert is_pure_real(K1)
    assert is_pure_real(DiffPolynomial.zero()) and is_pure_imaginary(DiffPolynomial.zero())


def test_negative_derivative_order_rejected():
    with pytest.raises(UsageError):
        DiffPolynomial.monomial(1, 0, ((0, 1),))
    with pytest.raises(UsageError):
        DiffPolynomial.monomial(1, 0, ((1, -1),))


def test_latex_contains_bracket():
    text = poly_to_latex(parse_polynomial("(3/8 i) k^-3 k1^2 + (-1/4 i) k^-2 k2"))
    assert "k'" in text and "k''" in text


# -- ring laws ---------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_leibniz(a, b):
    assert (a * b).diff() == a.diff() * b + a * b.diff()


@settings(max_examples=40, deadline=None)
@given(polys, polys, st.lists(st.complex_numbers(min_magnitude=0.5, max_magnitude=2), min_size=5, max_size=5))
def test_eval_is_homomorphism(a, b, jet):
    for lhs, rhs in ((poly_eval(a + b, jet), poly_eval(a, jet) + poly_eval(b, jet)),
                     (poly_eval(a * b, jet), poly_eval(a, jet) * poly_eval(b, jet))):
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs))


@settings(max_examples=60, deadline=None)
@given(polys)
def test_text_and_json_round_trip(a):
    assert DiffPolynomial.from_text(a.to_text()) == a
    assert DiffPolynomial.from_json(a.to_json()) == a


@settings(max_examples=30, deadline=None)
@given(_series(4))
def test_series_round_trip(s):
    assert GradedSeries.from_text(s.to_text()) == s
    assert GradedSeries.from_json(s.to_json()) == s


# -- series ------------------------------------------------------------------------


def _y_wkb2(cap=3):
    return GradedSeries([k_power(1, I), K1 * k_power(-1, GaussRational(Fraction(-1, 2)))], cap)


def test_series_mul_examples():
    a = _y_wkb2()
    assert series_mul(a, GradedSeries.unit(3)) == a
    ik = GradedSeries([k_power(1, I)], 3)
    sq = series_mul(ik, ik)
    assert sq[0] == k_power(2, -1) and sq[1].is_zero() and sq[2].is_zero()
    sq = series_mul(a, a)
    assert sq[0] == k_power(2, -1)
    assert sq[1] == K1 * GaussRational(0, -1)
    assert sq[2] == K1 * K1 * k_power(-2, GaussRational(Fraction(1, 4)))


def test_series_mul_cap_mismatch():
    with pytest.raises(UsageError):
        series_mul(GradedSeries.unit(2), GradedSeries.unit(3))


def test_reciprocal_examples():
    assert series_reciprocal(GradedSeries([k_power(1, I)], 1))[0] == k_power(-1, -I)
    r = series_reciprocal(_y_wkb2(2))
    assert r[0] == k_power(-1, -I)
    assert r[1] == K1 * k_power(-3, GaussRational(Fraction(-1, 2)))
    two = series_reciprocal(GradedSeries([k_power(1, 2 * I)], 1))
    assert two[0] == k_power(-1, GaussRational(0, Fraction(-1, 2)))


@settings(max_examples=30, deadline=None)
@given(_series(4), gauss.filter(bool), st.integers(-3, 3))
def test_reciprocal_inverts(s, c, d):
    a = GradedSeries([k_power(d, c)] + list(s.coeffs[1:]), 4)
    assert series_mul(a, series_reciprocal(a)) == GradedSeries.unit(4)


def test_reciprocal_singular_leading_terms():
    with pytest.raises(SingularLeadingTermError):
        series_reciprocal(GradedSeries.unit(3) - GradedSeries.unit(3))
    with pytest.raises(SingularLeadingTermError):
        series_reciprocal(GradedSeries([k_power(1) + K1], 2))
    with pytest.raises(SingularLeadingTermError):
        series_reciprocal(GradedSeries([K1], 2))


def test_g_diff_raises_order():
    a = _y_wkb2()
    d = a.g_diff()
    assert d[0].is_zero()
    assert d[1] == k_power(0, I) * K1
