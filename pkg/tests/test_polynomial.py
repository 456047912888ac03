from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rationals, square_matrices
from polyescape.linalg import is_zero, to_matrix
from polyescape.polynomial import (
    IntPolynomial,
    char_poly,
    char_poly_rational,
    clear_denominators,
    eval_matrix,
    from_roots,
    min_poly_rational,
    monic,
    poly_divmod,
    poly_gcd,
    poly_mul,
    squarefree_decomposition,
)

WORKED = [[1, 1, 0], [0, 1, 0], [0, 0, Fraction(101, 100)]]
x = sympy.Symbol("x")


def _sympy_coeffs(expr) -> tuple:
    return tuple(Fraction(str(c)) for c in reversed(sympy.Poly(expr, x).all_coeffs()))


def test_worked_char_poly():
    # (x - 1)^2 (x - 101/100), cleared: 100x^3 - 301x^2 + 302x - 101
    assert char_poly_rational(to_matrix(WORKED)) == from_roots([1, 1, Fraction(101, 100)])
    assert str(char_poly(to_matrix(WORKED))) == "100*x^3 - 301*x^2 + 302*x - 101"


def test_worked_min_poly():
    assert min_poly_rational(to_matrix(WORKED)) == from_roots([1, 1, Fraction(101, 100)])
    assert min_poly_rational(to_matrix([[2, 0], [0, 2]])) == from_roots([2])


@given(square_matrices(5))
@settings(max_examples=60, deadline=None)
def test_char_poly_matches_sympy(a):
    ours = char_poly_rational(to_matrix(a))
    assert ours == _sympy_coeffs(sympy.Matrix(a).charpoly(x).as_expr())


@given(square_matrices(5, 20, 20))
@settings(max_examples=60, deadline=None)
def test_cayley_hamilton_and_min_poly_divides(a):
    a = to_matrix(a)
    cp, mp = char_poly_rational(a), min_poly_rational(a)
    assert is_zero(eval_matrix(cp, a))
    assert is_zero(eval_matrix(mp, a))
    _, rem = poly_divmod(cp, mp)
    assert not rem


@given(st.lists(rationals(20, 5), min_size=1, max_size=6))
def test_squarefree_reassembles(roots):
    p = from_roots(roots)
    product = (Fraction(1),)
    for factor, mult in squarefree_decomposition(p):
        for _ in range(mult):
            product = poly_mul(product, factor.as_rational())
    assert monic(product) == monic(p)
    distinct = {Fraction(r) for r in roots}
    assert sum(f.degree for f, _ in squarefree_decomposition(p)) == len(distinct)


@given(st.lists(rationals(20, 5), min_size=1, max_size=5))
def test_clear_denominators(roots):
    p = from_roots(roots)
    q, scale = clear_denominators(p)
    assert tuple(scale * c for c in q.coeffs) == p
    assert q.coeffs[-1] > 0
    assert sympy.gcd_list(list(q.coeffs)) == 1


def test_gcd_is_monic():
    p = from_roots([1, 2, 3])
    q = from_roots([2, 3, 5])
    assert poly_gcd(p, q) == from_roots([2, 3])


def test_int_polynomial_call_and_str():
    p = IntPolynomial.from_ints([-1, 0, 1])
    assert p(3) == 8 and p.degree == 2
    assert str(p) == "x^2 - 1"
