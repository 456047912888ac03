from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyescape import directed

mpmath.mp.prec = 300


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


positive = st.builds(Fraction, st.integers(1, 10**12), st.integers(1, 10**12))


@given(positive)
@settings(max_examples=200)
def test_log_brackets(x):
    lo, hi = directed.log_lower(x), directed.log_upper(x)
    true = mpmath.log(_mp(x))
    assert _mp(lo) <= true <= _mp(hi)
    assert hi - lo < Fraction(1, 1 << 55)


@given(positive)
def test_sqrt_brackets(x):
    lo, hi = directed.sqrt_lower(x), directed.sqrt_upper(x)
    assert lo * lo <= x <= hi * hi


@given(st.builds(Fraction, st.integers(-4000, 4000), st.integers(1, 100)))
def test_exp_brackets(r):
    lo, hi = directed.exp_lower(r), directed.exp_upper(r)
    true = mpmath.exp(_mp(r))
    assert _mp(lo) <= true <= _mp(hi)
    # absolute grid of 2^-64 for small values, relative 2^-50 for large ones
    assert _mp(hi - lo) <= true * mpmath.mpf(2) ** -50 + mpmath.mpf(2) ** -60


def test_constants():
    assert _mp(directed.pi_lower()) < +mpmath.pi < _mp(directed.pi_upper())
    assert _mp(directed.log2_lower()) < mpmath.log(2) < _mp(directed.log2_upper())
    assert +mpmath.e < _mp(directed.e_upper()) < mpmath.e + mpmath.mpf(2) ** -60


def test_log_of_one_is_exact():
    assert directed.log_lower(1) == directed.log_upper(1) == 0


def test_grid_rounding():
    x = Fraction(1, 3)
    assert directed.floor_to_grid(x, 8) <= x <= directed.ceil_to_grid(x, 8)
    assert directed.ceil_to_grid(x, 8) - directed.floor_to_grid(x, 8) == Fraction(1, 256)


def test_log_rejects_nonpositive():
    with pytest.raises(ValueError):
        directed.log_upper(0)
