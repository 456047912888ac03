"""Heights of algebraic numbers and root separation bounds.

Transcendental constants enter only through directed rational approximations
(64 fractional bits), rounded in whichever direction keeps the bound sound.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from . import directed
from .logscale import LogScale
from .polynomial import IntPolynomial

LOG2_UPPER = directed.log2_upper()


@dataclass(frozen=True)
class HeightBound:
    naive_height_bound: int
    log_height_bound: Fraction
    degree_bound: int

    def __post_init__(self):
        if self.naive_height_bound < 1 or self.degree_bound < 1:
            raise ValueError("height and degree bounds are at least 1")


@dataclass(frozen=True)
class CharPolyBound:
    """Bound on the characteristic polynomial coefficients of a d x d, b-bit matrix."""

    log_bound: Fraction
    bound: int
    log_cleared_bound: Fraction
    cleared_bound: int
    proven_range: bool  # the coefficient bound is proven for d >= 4


def naive_height(p: IntPolynomial) -> int:
    if not p.coeffs:
        raise ValueError("zero polynomial has no height")
    return max(abs(c) for c in p.coeffs)


def rational_height(x: Fraction) -> HeightBound:
    """Height data of a rational, whose minimal polynomial is q*x - p."""
    x = Fraction(x)
    h = max(abs(x.numerator), x.denominator)
    return HeightBound(h, directed.log_upper(h), 1)


def liouville_bounds(h: int) -> tuple[Fraction, Fraction]:
    """Strict bounds 1/(H+1) < |alpha| < H+1 for a nonzero algebraic alpha of height H."""
    if h < 1:
        raise ValueError("height must be at least 1")
    return Fraction(1, h + 1), Fraction(h + 1)


def log_height_interval(h: int, degree: int) -> tuple[Fraction, Fraction]:
    """Bracket on the absolute logarithmic height from the naive height.

    (1/n) log H - log 2 < h(alpha) < (1/n) log H + (1/2n) log(n+1).
    """
    lo = directed.log_lower(h) / degree - LOG2_UPPER
    hi = directed.log_upper(h) / degree + directed.log_upper(degree + 1) / (2 * degree)
    return lo, hi


def arithmetic_height_bound(h_max, m: int) -> Fraction:
    """Height after an arithmetic circuit of m operations: (m+1) h_max + m log 2."""
    h_max = Fraction(h_max)
    if m < 0 or h_max < 0:
        raise ValueError("m and h_max must be nonnegative")
    return (m + 1) * h_max + m * LOG2_UPPER


def charpoly_coeff_bound(d: int, b: int) -> CharPolyBound:
    """||C_A||_inf <= (2 d B^2)^(d/2) with B = 2^b, and its 2^(bd)-cleared form."""
    if d < 1 or b < 1:
        raise ValueError("d and b must be at least 1")
    base = 2 * d * (1 << (2 * b))
    if d % 2 == 0:
        bound = base ** (d // 2)
    else:
        square = base**d
        bound = isqrt(square)
        if bound * bound < square:
            bound += 1
    log_bound = Fraction(d, 2) * directed.log_upper(base)
    cleared = bound << (b * d)
    log_cleared = log_bound + b * d * LOG2_UPPER
    return CharPolyBound(log_bound, bound, log_cleared, cleared, d >= 4)


def eigenvalue_height_bound(d: int, b: int) -> Fraction:
    """Closed-form height bound 3 b d^2 for an eigenvalue of a b-bit d x d matrix."""
    if d < 1 or b < 1:
        raise ValueError("d and b must be at least 1")
    return Fraction(3 * b * d * d)


def mignotte_separation(p: IntPolynomial) -> Fraction:
    """Rational lower bound of sqrt(6) / (n^((n+1)/2) H^(n-1)), n = degree, H = height."""
    n = p.degree
    if n < 2:
        raise ValueError("separation needs degree >= 2")
    h = naive_height(p)
    num = directed.sqrt_lower(6)
    if (n + 1) % 2 == 0:
        den = Fraction(n ** ((n + 1) // 2))
    else:
        den = directed.sqrt_upper(n ** (n + 1))
    den *= h ** (n - 1)
    # numerator rounded down, denominator rounded up
    return num / den


def inverse_eigenvalue_bound(d: int, b: int) -> LogScale:
    """Upper bound 4^(3 b d^3) on 1/|lambda| and 1/theta for nonzero parts."""
    if d < 1 or b < 1:
        raise ValueError("d and b must be at least 1")
    exponent = 3 * b * d**3
    if 2 * exponent <= 20_000:
        return LogScale.exact(4**exponent)
    return LogScale.from_log(2 * exponent * LOG2_UPPER)


def inverse_eigenvalue_lower(d: int, b: int) -> Fraction:
    """The reciprocal 4^(-3 b d^3) as an exact rational (lower bound on |lambda|, theta)."""
    return Fraction(1, 4 ** (3 * b * d**3))
