"""Certified eigenvalue enclosures, sign classification and indices.

Real roots are isolated with Sturm sequences over Q and refined by bisection;
rational roots are recognised and kept exact.  Non-real roots are located with
mpmath and then certified a posteriori: around an approximation ``z`` of a
root of a squarefree degree-n polynomial ``f``, the disk of radius
``n |f(z) / f'(z)|`` contains a root, and pairwise disjoint disks (one per
root) therefore each contain exactly one.  All certification arithmetic is
exact.
"""

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .directed import sqrt_upper
from .linalg import Matrix
from .polynomial import (
    IntPolynomial,
    RatPoly,
    char_poly_rational,
    clear_denominators,
    degree,
    derivative,
    evaluate,
    min_poly_rational,
    normalize,
    poly_divmod,
    poly_gcd,
    squarefree_decomposition,
)

DEFAULT_PRECISION = 128
MAX_PRECISION = 4096


class CertificationFailure(RuntimeError):
    """Root enclosures could not be certified at the maximum working precision."""


class Kind(enum.Enum):
    ZERO = "zero"
    POSITIVE_REAL = "positive_real"
    NEGATIVE_REAL = "negative_real"
    COMPLEX_PAIR = "complex_pair"


class Sign(enum.Enum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"
    ZERO_UNCERTIFIED = "zero_uncertified"


@dataclass(frozen=True)
class RealRoot:
    lo: Fraction
    hi: Fraction
    multiplicity: int = 1

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class ComplexRoot:
    """Box around an upper-half-plane root; ``imag_lo > 0``."""

    real_lo: Fraction
    real_hi: Fraction
    imag_lo: Fraction
    imag_hi: Fraction
    multiplicity: int = 1


@dataclass(frozen=True)
class EigenvalueEnclosure:
    kind: Kind
    real_interval: tuple[Fraction, Fraction]
    imag_interval: tuple[Fraction, Fraction] | None
    index: int
    alg_multiplicity: int

    @property
    def is_exact_real(self) -> bool:
        return self.kind is not Kind.COMPLEX_PAIR and self.real_interval[0] == self.real_interval[1]

    @property
    def abs_real_lower(self) -> Fraction:
        lo, hi = self.real_interval
        if lo <= 0 <= hi:
            return Fraction(0)
        return min(abs(lo), abs(hi))

    def describe(self) -> str:
        lo, hi = self.real_interval
        re = str(lo) if lo == hi else f"[{float(lo):.12g}, {float(hi):.12g}]"
        if self.kind is Kind.COMPLEX_PAIR:
            ilo, ihi = self.imag_interval
            im = str(ilo) if ilo == ihi else f"[{float(ilo):.12g}, {float(ihi):.12g}]"
            return f"{re} +/- i*{im}"
        return re


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[EigenvalueEnclosure, ...]
    dimension: int
    char_poly: IntPolynomial = field(compare=False)
    min_poly: IntPolynomial = field(compare=False)

    @property
    def real(self) -> tuple[EigenvalueEnclosure, ...]:
        return tuple(e for e in self.eigenvalues if e.kind is not Kind.COMPLEX_PAIR)

    @property
    def complex_pairs(self) -> tuple[EigenvalueEnclosure, ...]:
        return tuple(e for e in self.eigenvalues if e.kind is Kind.COMPLEX_PAIR)

    @property
    def has_zero(self) -> bool:
        return any(e.kind is Kind.ZERO for e in self.eigenvalues)

    @property
    def diagonalizable(self) -> bool:
        return all(e.index == 1 for e in self.eigenvalues)


# -- Sturm machinery -------------------------------------------------------


def sturm_sequence(p: RatPoly) -> list[RatPoly]:
    p = normalize(p)
    seq = [p, derivative(p)]
    while seq[-1] and degree(seq[-1]) > 0:
        _, r = poly_divmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append(tuple(-c for c in r))
    return [s for s in seq if s]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_variations(seq: Sequence[RatPoly], x: Fraction) -> int:
    signs = [s for s in (_sign(evaluate(p, x)) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(seq: Sequence[RatPoly], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct roots in the half-open interval (lo, hi]."""
    return sign_variations(seq, lo) - sign_variations(seq, hi)


def cauchy_bound(p: RatPoly) -> Fraction:
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def _squarefree_part(p) -> list[tuple[IntPolynomial, int]]:
    if isinstance(p, IntPolynomial):
        p = p.as_rational()
    return squarefree_decomposition(p)


def _isolate_squarefree(f: IntPolynomial, precision_bits: int) -> list[RealRoot]:
    rp = f.as_rational()
    seq = sturm_sequence(rp)
    bound = cauchy_bound(rp)
    # zero is always a split point so that no interval straddles it
    stack = [(-bound, Fraction(0)), (Fraction(0), bound)]
    isolated = []
    while stack:
        lo, hi = stack.pop()
        n = count_real_roots(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            isolated.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    target = Fraction(1, 1 << precision_bits)
    lead = abs(f.coeffs[-1])
    # below this width a rational root p/q (q | lead) is the unique best approximation
    rational_width = Fraction(1, 2 * lead * lead)
    roots = []
    for lo, hi in sorted(isolated):
        exact = None
        while exact is None:
            if evaluate(rp, hi) == 0:
                exact = hi
                break
            if hi - lo <= min(target, rational_width) and not lo <= 0 <= hi:
                break
            mid = (lo + hi) / 2
            if count_real_roots(seq, lo, mid) == 1:
                hi = mid
            else:
                lo = mid
        if exact is None:
            guess = ((lo + hi) / 2).limit_denominator(lead)
            if lo < guess <= hi and evaluate(rp, guess) == 0:
                exact = guess
        if exact is not None:
            roots.append(RealRoot(exact, exact))
        else:
            roots.append(RealRoot(lo, hi))
    return roots


def isolate_real_roots(p, precision_bits: int = DEFAULT_PRECISION) -> list[RealRoot]:
    """Disjoint intervals, one per distinct real root, with multiplicities.

    Each interval is either exact (``lo == hi``, the root is rational) or has
    width at most ``2**-precision_bits`` and contains exactly one root in
    ``(lo, hi]``.
    """
    out = []
    for f, mult in _squarefree_part(p):
        for r in _isolate_squarefree(f, precision_bits):
            out.append(RealRoot(r.lo, r.hi, mult))
    return sorted(out, key=lambda r: (r.lo, r.hi))


# -- complex roots ----------------------------------------------------------


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    value = Fraction(int(man)) * Fraction(2) ** exp
    return -value if sign else value


def _complex_eval(coeffs: Sequence[int], a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    re, im = Fraction(0), Fraction(0)
    for c in reversed(coeffs):
        re, im = re * a - im * b + c, re * b + im * a
    return re, im


def _imaginary_axis_polys(f: IntPolynomial) -> tuple[RatPoly, RatPoly]:
    # f(iy) = R(y) + i I(y)
    real, imag = [], []
    for k, c in enumerate(f.coeffs):
        unit = k % 4
        r = c if unit == 0 else (-c if unit == 2 else 0)
        i = c if unit == 1 else (-c if unit == 3 else 0)
        real.append(Fraction(r))
        imag.append(Fraction(i))
    return normalize(real), normalize(imag)


def _pure_imaginary_roots(f: IntPolynomial, precision_bits: int) -> list[RealRoot]:
    """Positive y with f(iy) = 0, isolated exactly as real roots of gcd(R, I)."""
    real, imag = _imaginary_axis_polys(f)
    if not real and not imag:
        raise ValueError("zero polynomial")
    g = poly_gcd(real, imag) if (real and imag) else (real or imag)
    if degree(g) < 1:
        return []
    return [r for r in isolate_real_roots(g, precision_bits) if r.lo > 0]


def _try_certify(f: IntPolynomial, precision_bits: int, work_bits: int, n_real: int) -> list[ComplexRoot] | None:
    n = f.degree
    deriv = [k * f.coeffs[k] for k in range(1, n + 1)]
    with mpmath.workprec(work_bits):
        try:
            approx = mpmath.polyroots(list(reversed(f.coeffs)), maxsteps=400, extraprec=work_bits)
        except mpmath.libmp.NoConvergence:
            return None
        centres = [(mpf_to_fraction(mpmath.re(z)), mpf_to_fraction(mpmath.im(z))) for z in approx]
    disks = []
    for a, b in centres:
        fr, fi = _complex_eval(f.coeffs, a, b)
        dr, di = _complex_eval(deriv, a, b)
        den = dr * dr + di * di
        if den == 0:
            return None
        r = sqrt_upper(n * n * (fr * fr + fi * fi) / den, work_bits + 8)
        disks.append((a, b, r))
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            ai, bi, ri = disks[i]
            aj, bj, rj = disks[j]
            if (ri + rj) ** 2 >= (ai - aj) ** 2 + (bi - bj) ** 2:
                return None
    target = Fraction(1, 1 << (precision_bits + 1))
    if any(r > target for _, _, r in disks):
        return None
    upper = [(a, b, r) for a, b, r in disks if b - r > 0]
    lower = [(a, b, r) for a, b, r in disks if b + r < 0]
    if len(upper) != len(lower) or 2 * len(upper) != n - n_real:
        return None

    imaginary_axis = _pure_imaginary_roots(f, precision_bits)
    straddling = [d for d in upper if d[0] - d[2] <= 0 <= d[0] + d[2]]
    if len(straddling) != len(imaginary_axis):
        return None
    out = []
    for a, b, r in upper:
        re_lo, re_hi = a - r, a + r
        im_lo, im_hi = b - r, b + r
        if (a, b, r) in straddling:
            re_lo = re_hi = Fraction(0)
            for y in imaginary_axis:
                if y.exact and im_lo <= y.lo <= im_hi:
                    im_lo = im_hi = y.lo
                elif not y.exact and y.lo < im_hi and im_lo < y.hi:
                    im_lo, im_hi = max(im_lo, y.lo), min(im_hi, y.hi)
        out.append(ComplexRoot(re_lo, re_hi, im_lo, im_hi))
    return out


def _complex_squarefree(f: IntPolynomial, precision_bits: int) -> list[ComplexRoot]:
    n_real = len(_isolate_squarefree(f, 8))
    if f.degree == n_real:
        return []
    work = precision_bits + 64
    while work <= MAX_PRECISION + 64:
        roots = _try_certify(f, precision_bits, work, n_real)
        if roots is not None:
            return roots
        work *= 2
    raise CertificationFailure(f"could not certify the non-real roots of {f}")


def isolate_complex_roots(p, precision_bits: int = DEFAULT_PRECISION) -> list[ComplexRoot]:
    """Certified boxes around the non-real roots in the upper half plane.

    Working precision doubles on failure up to ``MAX_PRECISION`` bits before
    ``CertificationFailure`` is raised.
    """
    out = []
    for f, mult in _squarefree_part(p):
        for r in _complex_squarefree(f, precision_bits):
            out.append(ComplexRoot(r.real_lo, r.real_hi, r.imag_lo, r.imag_hi, mult))
    return sorted(out, key=lambda r: (r.real_lo, r.imag_lo))


# -- spectrum ----------------------------------------------------------------


def _classify_real(root: RealRoot) -> Kind:
    if root.exact and root.lo == 0:
        return Kind.ZERO
    if root.lo >= 0:
        return Kind.POSITIVE_REAL
    return Kind.NEGATIVE_REAL


def spectrum(a: Matrix, precision_bits: int = DEFAULT_PRECISION) -> Spectrum:
    """Eigenvalue enclosures with algebraic multiplicity and index.

    The index of an eigenvalue is its multiplicity as a root of the minimal
    polynomial; the algebraic multiplicity is its multiplicity in the
    characteristic polynomial.
    """
    d = len(a)
    cp = char_poly_rational(a)
    mp = min_poly_rational(a)
    found = []
    for f, alg in squarefree_decomposition(cp):
        for g, idx in squarefree_decomposition(mp):
            h = poly_gcd(f.as_rational(), g.as_rational())
            if degree(h) < 1:
                continue
            hi_poly = clear_denominators(h)[0]
            for r in _isolate_squarefree(hi_poly, precision_bits):
                kind = _classify_real(r)
                found.append(EigenvalueEnclosure(kind, (r.lo, r.hi), None, idx, alg))
            for c in _complex_squarefree(hi_poly, precision_bits):
                found.append(
                    EigenvalueEnclosure(Kind.COMPLEX_PAIR, (c.real_lo, c.real_hi), (c.imag_lo, c.imag_hi), idx, alg)
                )
    found.sort(key=lambda e: (e.kind is Kind.COMPLEX_PAIR, e.real_interval, e.imag_interval or ()))
    total = sum(e.alg_multiplicity * (2 if e.kind is Kind.COMPLEX_PAIR else 1) for e in found)
    if total != d:
        raise CertificationFailure(f"multiplicities sum to {total}, expected {d}")
    return Spectrum(tuple(found), d, clear_denominators(cp)[0], clear_denominators(mp)[0])


def real_part_sign(e: EigenvalueEnclosure) -> Sign:
    lo, hi = e.real_interval
    if lo == hi == 0:
        return Sign.ZERO
    if lo > 0:
        return Sign.POSITIVE
    if hi < 0:
        return Sign.NEGATIVE
    if lo == 0 and e.kind is Kind.POSITIVE_REAL:
        return Sign.POSITIVE
    return Sign.ZERO_UNCERTIFIED
