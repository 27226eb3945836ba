from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcprefix.exactnum import ExactReal, exact_compare, exact_from_ln, exact_to_decimal

PRIMES = [2, 3, 5, 7, 11, 13]

small_fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
exact_reals = st.dictionaries(st.sampled_from(PRIMES), small_fracs, max_size=4).map(ExactReal)
pos_rationals = st.builds(Fraction, st.integers(1, 10**6), st.integers(1, 10**6))


def mp_value(a: ExactReal):
    return mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * mpmath.log(p) for p, c in a.terms.items())


def test_from_ln_examples():
    assert exact_from_ln(1).is_zero()
    assert exact_from_ln(8).terms == {2: 3}
    assert exact_from_ln(Fraction(1, 30)).terms == {2: -1, 3: -1, 5: -1}


def test_from_ln_rejects_non_positive():
    with pytest.raises(ValueError):
        exact_from_ln(0)
    with pytest.raises(ValueError):
        exact_from_ln(Fraction(-1, 2))


@pytest.mark.parametrize("fast", [True, False])
def test_compare_examples(fast):
    ln2, ln3 = exact_from_ln(2), exact_from_ln(3)
    assert exact_compare(exact_from_ln(8), exact_from_ln(8), fast) == 0
    # 3^2 = 9 > 8 = 2^3
    assert exact_compare(ln3 * 2, ln2 * 3, fast) == 1
    # 2^9 = 512 < 1296 = 6^4
    assert exact_compare(ln2 * Fraction(9, 4), exact_from_ln(6), fast) == -1


def test_decimal_examples():
    assert exact_to_decimal(exact_from_ln(2) * Fraction(9, 4), 6) == "1.559581"
    assert exact_to_decimal(ExactReal(), 6) == "0.000000"
    assert exact_to_decimal(exact_from_ln(30), 6) == "3.401197"
    assert exact_to_decimal(-exact_from_ln(30), 3) == "-3.401"


def test_basis_must_be_prime():
    with pytest.raises(ValueError):
        ExactReal({4: 1})


def test_zero_coefficients_dropped():
    assert ExactReal({2: 0, 3: 1}) == ExactReal({3: 1})
    assert exact_from_ln(6) - exact_from_ln(3) == exact_from_ln(2)


@settings(max_examples=300, deadline=None)
@given(exact_reals, exact_reals)
def test_compare_matches_high_precision(a, b):
    with mpmath.workdps(200):
        diff = mp_value(a) - mp_value(b)
        if a != b and abs(diff) < mpmath.mpf(10) ** -50:
            return
        expect = 0 if a == b else (1 if diff > 0 else -1)
    assert exact_compare(a, b) == expect
    assert exact_compare(a, b, fast=False) == expect


@settings(max_examples=200, deadline=None)
@given(exact_reals, exact_reals)
def test_equal_iff_same_terms(a, b):
    assert (exact_compare(a, b) == 0) == (a.terms == b.terms)


@settings(max_examples=200, deadline=None)
@given(pos_rationals, pos_rationals)
def test_ln_is_additive(x, y):
    assert exact_from_ln(x) + exact_from_ln(y) == exact_from_ln(x * y)


@settings(max_examples=100, deadline=None)
@given(exact_reals, st.integers(min_value=1, max_value=12))
def test_decimal_rounding_agrees_with_mpmath(a, digits):
    with mpmath.workdps(120):
        v = mp_value(a)
        scaled = v * mpmath.mpf(10) ** digits
        # skip values within 1e-40 of a rounding boundary
        frac = scaled - mpmath.floor(scaled)
        if abs(frac - mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -40:
            return
        r = int(mpmath.floor(scaled + mpmath.mpf(1) / 2))
    ten = 10**digits
    sign = "-" if r < 0 else ""
    expect = f"{sign}{abs(r) // ten}.{abs(r) % ten:0{digits}d}"
    if a.is_zero():
        expect = "0." + "0" * digits
    assert exact_to_decimal(a, digits) == expect


def test_large_exponents_use_refinement():
    # denominators with a huge lcm make direct factorisation infeasible
    mpmath.mp.dps = 200
    a = ExactReal({2: Fraction(37, 29), 3: Fraction(-41, 23), 19: Fraction(13, 27)})
    b = ExactReal({5: Fraction(7, 17), 7: Fraction(-11, 19), 13: Fraction(5, 31)})
    want = 1 if mp_value(a) > mp_value(b) else -1
    assert exact_compare(a, b, fast=False) == want
    assert exact_compare(b, a, fast=False) == -want
    # 2^485 and 3^306 are close powers
    c, d = ExactReal({2: Fraction(485, 7)}), ExactReal({3: Fraction(306, 7)})
    assert exact_compare(c, d) == (1 if mp_value(c) > mp_value(d) else -1)
