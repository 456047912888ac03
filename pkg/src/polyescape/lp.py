"""Exact rational linear programming over polytopes {x | Bx <= c}.

A dense two-phase tableau simplex with Bland's rule.  Every arithmetic
operation is on ``Fraction``; there are no tolerances anywhere.
"""

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from .linalg import Matrix, NoSolution, Vector, bit_size, dot, gauss_solve, mat_vec, to_matrix, to_vector

VERTEX_ENUMERATION_CAP = 200_000


class DimensionTooLarge(ValueError):
    pass


class Status(enum.Enum):
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    OPTIMAL = "optimal"


class Shape(enum.Enum):
    EMPTY = "empty"
    UNBOUNDED = "unbounded"
    COMPACT_NONEMPTY = "compact_nonempty"


@dataclass(frozen=True)
class Polytope:
    """The set {x in R^d | B x <= c}."""

    B: Matrix
    c: Vector

    def __post_init__(self):
        object.__setattr__(self, "B", to_matrix(self.B))
        object.__setattr__(self, "c", to_vector(self.c))
        if len(self.B) != len(self.c):
            raise ValueError("B and c have different numbers of rows")
        if not self.B or len(self.B[0]) < 1:
            raise ValueError("polytope needs at least one constraint and dimension >= 1")

    @property
    def dimension(self) -> int:
        return len(self.B[0])

    def contains(self, x: Sequence) -> bool:
        x = to_vector(x)
        return all(dot(row, x) <= ci for row, ci in zip(self.B, self.c))

    def slack(self, x: Sequence) -> Vector:
        return tuple(ci - v for ci, v in zip(self.c, mat_vec(self.B, to_vector(x))))

    def bit_size(self) -> int:
        return max(bit_size(self.B), bit_size(self.c))

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence) -> "Polytope":
        d = len(lower)
        rows, rhs = [], []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            rows.append(e)
            rhs.append(upper[i])
            rows.append([-x for x in e])
            rhs.append(-Fraction(lower[i]))
        return cls(rows, rhs)


@dataclass(frozen=True)
class LpOutcome:
    status: Status
    witness: Vector | None = None
    value: Fraction | None = None


class _Tableau:
    """Standard form: maximize obj.x subject to rows.x = rhs, x >= 0, rhs >= 0."""

    def __init__(self, rows, rhs, basis):
        self.rows = [list(r) for r in rows]
        self.rhs = list(rhs)
        self.basis = list(basis)

    def set_objective(self, obj):
        self.obj = list(obj)
        self.obj_rhs = Fraction(0)
        for i, b in enumerate(self.basis):
            cb = obj[b]
            if cb != 0:
                self.obj = [o - cb * a for o, a in zip(self.obj, self.rows[i])]
                self.obj_rhs -= cb * self.rhs[i]

    def pivot(self, r, col):
        inv = 1 / self.rows[r][col]
        self.rows[r] = [a * inv for a in self.rows[r]]
        self.rhs[r] *= inv
        prow, prhs = self.rows[r], self.rhs[r]
        for i in range(len(self.rows)):
            if i != r:
                f = self.rows[i][col]
                if f != 0:
                    self.rows[i] = [a - f * b for a, b in zip(self.rows[i], prow)]
                    self.rhs[i] -= f * prhs
        f = self.obj[col]
        if f != 0:
            self.obj = [a - f * b for a, b in zip(self.obj, prow)]
            self.obj_rhs -= f * prhs
        self.basis[r] = col

    def run(self, allowed):
        """Bland's rule iterations.  Returns None when optimal, else the unbounded column."""
        while True:
            col = next((j for j in allowed if self.obj[j] > 0), None)
            if col is None:
                return None
            best = None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return col
            self.pivot(best[1], col)

    def point(self, n):
        x = [Fraction(0)] * n
        for i, b in enumerate(self.basis):
            if b < n:
                x[b] = self.rhs[i]
        return x


def solve_standard(a_ub, b_ub, a_eq, b_eq, objective, n_vars) -> tuple[Status, list | None, Fraction | None, list | None]:
    """Maximize objective.x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.

    Returns (status, point, value, ray) where ray is set for unbounded problems.
    """
    rows, rhs, need_art = [], [], []
    n_ub = len(a_ub)
    n_slack = n_ub
    for i, (row, b) in enumerate(zip(a_ub, b_ub)):
        slack = [Fraction(0)] * n_slack
        slack[i] = Fraction(1)
        full = [Fraction(v) for v in row] + slack
        b = Fraction(b)
        if b < 0:
            full = [-v for v in full]
            b = -b
            need_art.append(True)
        else:
            need_art.append(False)
        rows.append(full)
        rhs.append(b)
    for row, b in zip(a_eq, b_eq):
        full = [Fraction(v) for v in row] + [Fraction(0)] * n_slack
        b = Fraction(b)
        if b < 0:
            full = [-v for v in full]
            b = -b
        rows.append(full)
        rhs.append(b)
        need_art.append(True)
    n_struct = n_vars + n_slack
    art_rows = [i for i, flag in enumerate(need_art) if flag]
    n_total = n_struct + len(art_rows)
    for i, row in enumerate(rows):
        row.extend([Fraction(0)] * len(art_rows))
    basis = []
    art_of_row = {}
    for k, i in enumerate(art_rows):
        rows[i][n_struct + k] = Fraction(1)
        art_of_row[i] = n_struct + k
    for i in range(len(rows)):
        basis.append(art_of_row[i] if i in art_of_row else n_vars + i)
    tab = _Tableau(rows, rhs, basis)

    if art_rows:
        phase1 = [Fraction(0)] * n_struct + [Fraction(-1)] * len(art_rows)
        tab.set_objective(phase1)
        tab.run(range(n_total))
        if tab.obj_rhs != 0:
            return Status.INFEASIBLE, None, None, None
        # drive zero-level artificials out of the basis; drop redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= n_struct:
                col = next((j for j in range(n_struct) if tab.rows[i][j] != 0), None)
                if col is None:
                    del tab.rows[i], tab.rhs[i], tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1
        tab.rows = [r[:n_struct] for r in tab.rows]
        tab.obj = tab.obj[:n_struct]

    obj = [Fraction(v) for v in objective] + [Fraction(0)] * n_slack
    tab.set_objective(obj)
    col = tab.run(range(n_struct))
    if col is not None:
        ray = [Fraction(0)] * n_struct
        ray[col] = Fraction(1)
        for i, b in enumerate(tab.basis):
            ray[b] = -tab.rows[i][col]
        return Status.UNBOUNDED, tab.point(n_vars), None, ray[:n_vars]
    point = tab.point(n_vars)
    value = sum((Fraction(v) * x for v, x in zip(objective, point)), Fraction(0))
    return Status.OPTIMAL, point, value, None


def _split_free(p: Polytope, objective: Sequence):
    # x = u - w with u, w >= 0
    d = p.dimension
    a_ub = [list(row) + [-v for v in row] for row in p.B]
    obj = [Fraction(v) for v in objective]
    return a_ub, obj + [-v for v in obj], d


def _join(u, d):
    return tuple(u[i] - u[d + i] for i in range(d))


def lp_optimize(p: Polytope, objective: Sequence, sense: str = "max") -> LpOutcome:
    """Exact optimum of ``objective . x`` over the polytope.

    ``sense`` is ``"max"`` or ``"min"``.  For an unbounded problem the witness
    is a recession ray ``r`` with ``B r <= 0`` and an improving objective.
    """
    if len(objective) != p.dimension:
        raise ValueError("objective has wrong length")
    if sense not in ("max", "min"):
        raise ValueError(f"unknown sense {sense!r}")
    sign = 1 if sense == "max" else -1
    a_ub, obj, d = _split_free(p, [sign * Fraction(v) for v in objective])
    status, point, value, ray = solve_standard(a_ub, p.c, [], [], obj, 2 * d)
    if status is Status.INFEASIBLE:
        return LpOutcome(Status.INFEASIBLE)
    if status is Status.UNBOUNDED:
        return LpOutcome(Status.UNBOUNDED, witness=_join(ray, d))
    x = _join(point, d)
    return LpOutcome(Status.OPTIMAL, witness=x, value=dot(to_vector(objective), x))


def lp_feasible_with_equalities(p: Polytope, e: Sequence[Sequence], f: Sequence) -> LpOutcome:
    """Feasibility of {x | Bx <= c, Ex = f}; the witness is a basic feasible point.

    Each equality is split into a pair of inequalities so that a single solver
    path handles everything.
    """
    e = to_matrix(e)
    f = to_vector(f)
    if e and len(e[0]) != p.dimension:
        raise ValueError("equality matrix has wrong width")
    rows = list(p.B) + list(e) + [tuple(-v for v in row) for row in e]
    rhs = list(p.c) + list(f) + [-v for v in f]
    joined = Polytope(rows, rhs)
    out = lp_optimize(joined, [0] * p.dimension, "max")
    if out.status is Status.INFEASIBLE:
        return out
    return LpOutcome(Status.OPTIMAL, witness=out.witness, value=Fraction(0))


def is_compact_nonempty(p: Polytope) -> Shape:
    d = p.dimension
    first = lp_optimize(p, [0] * d)
    if first.status is Status.INFEASIBLE:
        return Shape.EMPTY
    for i in range(d):
        e = [0] * d
        e[i] = 1
        for sense in ("max", "min"):
            if lp_optimize(p, e, sense).status is Status.UNBOUNDED:
                return Shape.UNBOUNDED
    return Shape.COMPACT_NONEMPTY


def vertices(p: Polytope, cap: int = VERTEX_ENUMERATION_CAP) -> list[Vector]:
    """All vertices, by brute force over d-subsets of the constraints.

    Each vertex is the unique solution of d active constraints and is checked
    feasible exactly.  The result is sorted and free of duplicates.
    """
    n, d = len(p.B), p.dimension
    if comb(n, d) > cap:
        raise DimensionTooLarge(f"C({n}, {d}) = {comb(n, d)} exceeds the enumeration cap {cap}")
    found = set()
    for subset in combinations(range(n), d):
        sub_b = tuple(p.B[i] for i in subset)
        sub_c = tuple(p.c[i] for i in subset)
        try:
            sol = gauss_solve(sub_b, sub_c)
        except NoSolution:
            continue
        if not sol.unique:
            continue
        if p.contains(sol.particular):
            found.add(sol.particular)
    return sorted(found)


def active_constraints(p: Polytope, x: Sequence) -> int:
    x = to_vector(x)
    return sum(1 for row, ci in zip(p.B, p.c) if dot(row, x) == ci)
