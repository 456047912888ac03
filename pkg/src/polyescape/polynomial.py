"""Univariate polynomials over Q and Z, plus characteristic/minimal polynomials.

Rational polynomials are plain tuples of ``Fraction`` in ascending degree with
no trailing zeros (the zero polynomial is the empty tuple).  ``IntPolynomial``
is the integer-coefficient form used for heights and root isolation.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from .linalg import (
    Matrix,
    NoSolution,
    gauss_solve,
    identity,
    mat_add,
    mat_mul,
    mat_scale,
    trace,
    transpose,
    zeros,
)

RatPoly = tuple[Fraction, ...]


def normalize(coeffs: Sequence) -> RatPoly:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(p: RatPoly) -> int:
    return len(p) - 1


def poly_add(p: RatPoly, q: RatPoly) -> RatPoly:
    n = max(len(p), len(q))
    return normalize([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def poly_sub(p: RatPoly, q: RatPoly) -> RatPoly:
    return poly_add(p, tuple(-x for x in q))


def poly_mul(p: RatPoly, q: RatPoly) -> RatPoly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return normalize(out)


def poly_divmod(p: RatPoly, q: RatPoly) -> tuple[RatPoly, RatPoly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    quot = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    lead = q[-1]
    while len(rem) >= len(q) and rem:
        shift = len(rem) - len(q)
        f = rem[-1] / lead
        quot[shift] = f
        for i, b in enumerate(q):
            rem[shift + i] -= f * b
        rem.pop()
        while rem and rem[-1] == 0:
            rem.pop()
    return normalize(quot), normalize(rem)


def monic(p: RatPoly) -> RatPoly:
    if not p:
        return p
    lead = p[-1]
    return tuple(x / lead for x in p)


def poly_gcd(p: RatPoly, q: RatPoly) -> RatPoly:
    """Monic gcd (the zero polynomial only when both inputs are zero)."""
    a, b = normalize(p), normalize(q)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return monic(a)


def derivative(p: RatPoly) -> RatPoly:
    return normalize([i * p[i] for i in range(1, len(p))])


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def eval_matrix(p: RatPoly, a: Matrix) -> Matrix:
    """Exact substitution of a square matrix into a polynomial (Horner)."""
    n = len(a)
    acc = zeros(n, n)
    for c in reversed(p):
        acc = mat_add(mat_mul(acc, a), mat_scale(identity(n), c))
    return acc


def from_roots(roots: Sequence) -> RatPoly:
    p: RatPoly = (Fraction(1),)
    for r in roots:
        p = poly_mul(p, (-Fraction(r), Fraction(1)))
    return p


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients ascending, no trailing zero."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("trailing zero coefficient")

    @classmethod
    def from_ints(cls, coeffs: Sequence[int]) -> "IntPolynomial":
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_rational(self) -> RatPoly:
        return tuple(Fraction(c) for c in self.coeffs)

    def __call__(self, x):
        return evaluate(self.coeffs, x)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' if mono else ''}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def clear_denominators(p: RatPoly) -> tuple[IntPolynomial, Fraction]:
    """Primitive integer polynomial ``q`` and scale ``s`` with ``p == s * q``.

    The leading coefficient of ``q`` is made positive.
    """
    p = normalize(p)
    if not p:
        return IntPolynomial(()), Fraction(1)
    den = reduce(lcm, (c.denominator for c in p), 1)
    ints = [int(c * den) for c in p]
    content = reduce(gcd, ints, 0)
    if ints[-1] < 0:
        content = -content
    q = IntPolynomial(tuple(c // content for c in ints))
    return q, Fraction(content, den)


def char_poly_rational(a: Matrix) -> RatPoly:
    """Monic characteristic polynomial det(xI - A) by Faddeev-LeVerrier."""
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = zeros(n, n)
    eye = identity(n)
    for k in range(1, n + 1):
        m = mat_add(mat_mul(a, m), mat_scale(eye, coeffs[n - k + 1]))
        coeffs[n - k] = -trace(mat_mul(a, m)) / k
    return tuple(coeffs)


def char_poly(a: Matrix) -> IntPolynomial:
    return clear_denominators(char_poly_rational(a))[0]


def min_poly_rational(a: Matrix) -> RatPoly:
    """Monic minimal polynomial: the first power of A dependent on lower ones."""
    n = len(a)
    powers = [identity(n)]
    flat = lambda m: tuple(x for row in m for x in row)  # noqa: E731
    for k in range(1, n + 1):
        nxt = mat_mul(powers[-1], a)
        # columns of the system are vec(A^0) .. vec(A^(k-1))
        system = transpose(tuple(flat(p) for p in powers))
        try:
            sol = gauss_solve(system, flat(nxt))
        except NoSolution:
            powers.append(nxt)
            continue
        return tuple(-c for c in sol.particular) + (Fraction(1),)
    raise AssertionError("Cayley-Hamilton violated")  # pragma: no cover


def min_poly(a: Matrix) -> IntPolynomial:
    return clear_denominators(min_poly_rational(a))[0]


def squarefree_decomposition(p: RatPoly | IntPolynomial) -> list[tuple[IntPolynomial, int]]:
    """Yun's algorithm; returns primitive squarefree factors with multiplicities.

    The product of ``factor**multiplicity`` equals ``p`` up to a nonzero
    constant; factors are pairwise coprime.
    """
    if isinstance(p, IntPolynomial):
        p = p.as_rational()
    p = monic(normalize(p))
    if not p:
        raise ValueError("zero polynomial has no squarefree decomposition")
    out = []
    if degree(p) == 0:
        return out
    dp = derivative(p)
    a = poly_gcd(p, dp)
    b = poly_divmod(p, a)[0]
    c = poly_divmod(dp, a)[0]
    d = poly_sub(c, derivative(b))
    i = 1
    while degree(b) > 0:
        g = poly_gcd(b, d)
        if degree(g) > 0:
            out.append((clear_denominators(g)[0], i))
        b = poly_divmod(b, g)[0]
        c = poly_divmod(d, g)[0]
        d = poly_sub(c, derivative(b))
        i += 1
    return out
