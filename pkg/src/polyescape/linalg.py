"""Exact dense linear algebra over the rationals.

Matrices are tuples of row tuples of ``Fraction`` and vectors are tuples of
``Fraction``.  Nothing here mutates its inputs.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]


class NoSolution(ValueError):
    """Raised when a linear system is inconsistent."""


def to_vector(entries: Sequence) -> Vector:
    return tuple(Fraction(e) for e in entries)


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    rows = tuple(to_vector(r) for r in rows)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(rows: int, cols: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Matrix, s) -> Matrix:
    s = Fraction(s)
    return tuple(tuple(s * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def mat_vec(a: Matrix, v: Vector) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def dot(u: Vector, v: Vector) -> Fraction:
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def hstack(a: Matrix, b: Matrix) -> Matrix:
    return tuple(ra + rb for ra, rb in zip(a, b))


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns.

    Pivots are the first nonzero entry in column order; exact arithmetic needs
    no magnitude pivoting, and this choice keeps the output deterministic.
    """
    rows = [list(r) for r in m]
    n_rows, n_cols = shape(m)
    pivots = []
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    return tuple(tuple(row) for row in rows), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel(m: Matrix) -> Matrix:
    """Basis of the null space, returned as the columns of a matrix.

    An invertible (or empty-kernel) matrix gives a matrix with zero columns,
    represented as ``n`` empty rows.
    """
    _, n_cols = shape(m)
    reduced, pivots = rref(m)
    free = [j for j in range(n_cols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i][f]
        basis.append(tuple(v))
    return tuple(tuple(b[i] for b in basis) for i in range(n_cols))


def kernel_vectors(m: Matrix) -> list[Vector]:
    k = kernel(m)
    if not k or not k[0]:
        return []
    return list(transpose(k))


@dataclass(frozen=True)
class LinearSolution:
    particular: Vector
    kernel_basis: tuple[Vector, ...]

    @property
    def unique(self) -> bool:
        return not self.kernel_basis


def gauss_solve(m: Matrix, v: Sequence) -> LinearSolution:
    """Solve ``m x = v`` exactly.

    Returns the particular solution with free variables set to zero, together
    with a kernel basis (empty when the solution is unique).
    """
    m, v = to_matrix(m), to_vector(v)
    n_rows, n_cols = shape(m)
    if n_rows != len(v):
        raise ValueError("dimension mismatch")
    augmented = tuple(row + (b,) for row, b in zip(m, v))
    reduced, pivots = rref(augmented)
    if n_cols in pivots:
        raise NoSolution("inconsistent linear system")
    x = [Fraction(0)] * n_cols
    for i, p in enumerate(pivots):
        x[p] = reduced[i][n_cols]
    return LinearSolution(tuple(x), tuple(kernel_vectors(m)))


def determinant(m: Matrix) -> Fraction:
    n = len(m)
    rows = [list(r) for r in m]
    det = Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if rows[i][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for i in range(col + 1, n):
            if rows[i][col] != 0:
                f = rows[i][col] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return det


def rational_bits(x: Fraction) -> int:
    """Bits of |numerator| plus bits of the denominator (at least 1 each)."""
    x = Fraction(x)
    return max(1, abs(x.numerator).bit_length()) + x.denominator.bit_length()


def bit_size(obj) -> int:
    """Maximum ``rational_bits`` over a scalar, vector, matrix or nested mix."""
    if isinstance(obj, (Fraction, int)):
        return rational_bits(Fraction(obj))
    if hasattr(obj, "bit_size"):
        return obj.bit_size()
    best = 0
    for item in obj:
        best = max(best, bit_size(item))
    return best
