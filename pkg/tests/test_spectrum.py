from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings

from conftest import square_matrices
from polyescape.polynomial import IntPolynomial, from_roots
from polyescape.spectrum import (
    Kind,
    Sign,
    count_real_roots,
    isolate_complex_roots,
    isolate_real_roots,
    real_part_sign,
    spectrum,
    sturm_sequence,
)

WORKED = [[1, 1, 0], [0, 1, 0], [0, 0, Fraction(101, 100)]]


def test_worked_spectrum():
    s = spectrum(WORKED)
    one, other = s.eigenvalues
    assert one.real_interval == (1, 1) and one.index == 2 and one.alg_multiplicity == 2
    assert other.real_interval == (Fraction(101, 100),) * 2 and other.index == 1
    assert not s.diagonalizable and not s.has_zero


def test_rotation_is_exact_imaginary():
    (e,) = spectrum([[0, -1], [1, 0]]).eigenvalues
    assert e.kind is Kind.COMPLEX_PAIR
    assert e.real_interval == (0, 0) and e.imag_interval == (1, 1)


def test_zero_matrix():
    (e,) = spectrum([[0] * 3] * 3).eigenvalues
    assert e.kind is Kind.ZERO and e.index == 1 and e.alg_multiplicity == 3
    assert real_part_sign(e) is Sign.ZERO


def test_nilpotent_index():
    (e,) = spectrum([[0, 1, 0], [0, 0, 1], [0, 0, 0]]).eigenvalues
    assert e.index == 3


def test_sqrt_two_intervals():
    roots = isolate_real_roots((-2, 0, 1), 64)
    assert len(roots) == 2
    for r in roots:
        assert r.hi - r.lo <= Fraction(1, 1 << 64)
        assert r.lo * r.lo <= 2 <= r.hi * r.hi or r.hi * r.hi <= 2 <= r.lo * r.lo


def test_mixed_roots():
    # (x - 1)(x^2 + 4)
    p = IntPolynomial.from_ints([-4, 4, -1, 1])
    (c,) = isolate_complex_roots(p)
    assert (c.real_lo, c.real_hi, c.imag_lo, c.imag_hi) == (0, 0, 2, 2)
    assert [r.lo for r in isolate_real_roots(p)] == [1]


def test_sturm_count():
    seq = sturm_sequence(from_roots([-3, 1, 2]))
    assert count_real_roots(seq, Fraction(-10), Fraction(10)) == 3
    assert count_real_roots(seq, Fraction(0), Fraction(3, 2)) == 1


@given(square_matrices(4, 9, 4))
@settings(max_examples=60, deadline=None)
def test_enclosures_contain_sympy_eigenvalues(a):
    s = spectrum(a)
    total = sum(e.alg_multiplicity * (2 if e.kind is Kind.COMPLEX_PAIR else 1) for e in s.eigenvalues)
    assert total == len(a)
    numeric = [complex(v) for v, m in sympy.Matrix(a).eigenvals().items() for _ in range(m)]
    for e in s.eigenvalues:
        lo, hi = (float(v) for v in e.real_interval)
        if e.kind is Kind.COMPLEX_PAIR:
            ilo, ihi = (float(v) for v in e.imag_interval)
            assert ilo > 0
            hits = [z for z in numeric if lo - 1e-9 <= z.real <= hi + 1e-9 and ilo - 1e-9 <= z.imag <= ihi + 1e-9]
        else:
            hits = [z for z in numeric if abs(z.imag) < 1e-9 and lo - 1e-9 <= z.real <= hi + 1e-9]
        assert len(hits) >= e.alg_multiplicity
        if e.kind is not Kind.COMPLEX_PAIR:
            assert (e.kind is Kind.ZERO) == (lo == hi == 0)


@pytest.mark.parametrize(
    "matrix, indices",
    [
        ([[2, 1], [0, 2]], [2]),
        ([[2, 0], [0, 2]], [1]),
        ([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]], [2, 1]),
    ],
)
def test_index_matches_jordan_blocks(matrix, indices):
    assert sorted(e.index for e in spectrum(matrix).eigenvalues) == sorted(indices)
