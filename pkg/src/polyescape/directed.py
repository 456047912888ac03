"""Directed rational approximations of transcendental quantities.

Every function returns a ``Fraction`` that is a guaranteed lower or upper
bound of the true real value.  Results are snapped outward onto the grid
``2**-bits`` so that their size stays bounded.
"""

from fractions import Fraction
from functools import lru_cache
from math import isqrt

DEFAULT_BITS = 64


def floor_to_grid(x: Fraction, bits: int = DEFAULT_BITS) -> Fraction:
    scale = 1 << bits
    return Fraction((x.numerator * scale) // x.denominator, scale)


def ceil_to_grid(x: Fraction, bits: int = DEFAULT_BITS) -> Fraction:
    scale = 1 << bits
    return Fraction(-((-x.numerator * scale) // x.denominator), scale)


def _atanh_interval(y: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    # 0 <= y <= 1/3; all series terms are nonnegative.
    if y == 0:
        return Fraction(0), Fraction(0)
    target = Fraction(1, 1 << (bits + 8))
    y2 = y * y
    term = y
    total = Fraction(0)
    k = 0
    while True:
        total += term / (2 * k + 1)
        term *= y2
        k += 1
        # tail after the terms summed so far
        tail = term / ((2 * k + 1) * (1 - y2))
        if tail < target:
            return total, total + tail


@lru_cache(maxsize=None)
def _log2_interval(bits: int) -> tuple[Fraction, Fraction]:
    lo, hi = _atanh_interval(Fraction(1, 3), bits + 8)
    return floor_to_grid(2 * lo, bits + 4), ceil_to_grid(2 * hi, bits + 4)


def _log_interval(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    if x <= 0:
        raise ValueError(f"log of non-positive number {x}")
    x = Fraction(x)
    m = x.numerator.bit_length() - x.denominator.bit_length()
    r = x / Fraction(2) ** m
    while r >= 2:
        r /= 2
        m += 1
    while r < 1:
        r *= 2
        m -= 1
    # keep the reduced argument small in size without losing the direction
    r_lo = max(Fraction(1), floor_to_grid(r, bits + 16))
    r_hi = min(Fraction(2), ceil_to_grid(r, bits + 16))
    a_lo, _ = _atanh_interval((r_lo - 1) / (r_lo + 1), bits + 8)
    _, a_hi = _atanh_interval((r_hi - 1) / (r_hi + 1), bits + 8)
    l2_lo, l2_hi = _log2_interval(bits + 8)
    if m >= 0:
        base_lo, base_hi = m * l2_lo, m * l2_hi
    else:
        base_lo, base_hi = m * l2_hi, m * l2_lo
    return base_lo + 2 * a_lo, base_hi + 2 * a_hi


def log_lower(x, bits: int = DEFAULT_BITS) -> Fraction:
    """Rational lower bound on the natural logarithm of ``x > 0``."""
    x = Fraction(x)
    if x == 1:
        return Fraction(0)
    return floor_to_grid(_log_interval(x, bits)[0], bits)


def log_upper(x, bits: int = DEFAULT_BITS) -> Fraction:
    """Rational upper bound on the natural logarithm of ``x > 0``."""
    x = Fraction(x)
    if x == 1:
        return Fraction(0)
    return ceil_to_grid(_log_interval(x, bits)[1], bits)


def log2_lower(bits: int = DEFAULT_BITS) -> Fraction:
    return floor_to_grid(_log2_interval(bits)[0], bits)


def log2_upper(bits: int = DEFAULT_BITS) -> Fraction:
    return ceil_to_grid(_log2_interval(bits)[1], bits)


def _atan_inv_interval(n: int, bits: int) -> tuple[Fraction, Fraction]:
    # atan(1/n) by its alternating series
    target = Fraction(1, 1 << (bits + 8))
    x = Fraction(1, n)
    x2 = x * x
    term = x
    total = Fraction(0)
    k = 0
    while True:
        nxt = term / (2 * k + 1)
        if nxt < target:
            # the partial sum and the partial sum plus next term bracket it
            if k % 2 == 0:
                return total, total + nxt
            return total - nxt, total
        total += nxt if k % 2 == 0 else -nxt
        term *= x2
        k += 1


@lru_cache(maxsize=None)
def _pi_interval(bits: int) -> tuple[Fraction, Fraction]:
    a_lo, a_hi = _atan_inv_interval(5, bits + 8)
    b_lo, b_hi = _atan_inv_interval(239, bits + 8)
    return 16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo


def pi_lower(bits: int = DEFAULT_BITS) -> Fraction:
    return floor_to_grid(_pi_interval(bits)[0], bits)


def pi_upper(bits: int = DEFAULT_BITS) -> Fraction:
    return ceil_to_grid(_pi_interval(bits)[1], bits)


def sqrt_lower(x, bits: int = DEFAULT_BITS) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt of negative number")
    scaled = (x.numerator << (2 * bits)) // x.denominator
    return Fraction(isqrt(scaled), 1 << bits)


def sqrt_upper(x, bits: int = DEFAULT_BITS) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt of negative number")
    num = x.numerator << (2 * bits)
    scaled = -((-num) // x.denominator)
    root = isqrt(scaled)
    if root * root < scaled:
        root += 1
    return Fraction(root, 1 << bits)


def _exp_small(s: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    # |s| <= 1/2: Taylor series with the Lagrange remainder bounded by 2|s|^(N+1)/(N+1)!
    target = Fraction(1, 1 << (bits + 8))
    total = Fraction(0)
    term = Fraction(1)
    n = 0
    while True:
        total += term
        n += 1
        term = term * s / n
        rem = 2 * abs(term)
        if rem < target:
            return total - rem, total + rem


def _exp_interval(r: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    k = 0
    s = Fraction(r)
    while abs(s) > Fraction(1, 2):
        s /= 2
        k += 1
    work = bits + 2 * k + 16
    lo, hi = _exp_small(s, work)
    lo, hi = floor_to_grid(lo, work), ceil_to_grid(hi, work)
    for _ in range(k):
        lo = floor_to_grid(lo * lo, work)
        hi = ceil_to_grid(hi * hi, work)
    return lo, hi


def exp_lower(r, bits: int = DEFAULT_BITS) -> Fraction:
    """Rational lower bound on ``exp(r)``.  Intended for moderate ``|r|``."""
    r = Fraction(r)
    if r == 0:
        return Fraction(1)
    return max(Fraction(0), floor_to_grid(_exp_interval(r, bits)[0], bits))


def exp_upper(r, bits: int = DEFAULT_BITS) -> Fraction:
    """Rational upper bound on ``exp(r)``.  Intended for moderate ``|r|``."""
    r = Fraction(r)
    if r == 0:
        return Fraction(1)
    value = ceil_to_grid(_exp_interval(r, bits)[1], bits)
    # never report 0 as an upper bound of a positive number
    return value if value > 0 else Fraction(1, 1 << bits)


def e_upper(bits: int = DEFAULT_BITS) -> Fraction:
    return exp_upper(1, bits)
