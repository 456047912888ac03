"""Escape decision for compact polytopes.

For a compact polytope, some trajectory stays inside forever exactly when the
polytope contains a fixed point of the dynamics.  Deciding escape therefore
reduces to one exact LP: is {x in P | Ax = 0} (continuous) or
{x in P | Ax = x} (discrete) empty?
"""

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, Vector, bit_size, identity, kernel, mat_sub, mat_vec, to_matrix, to_vector
from .lp import Polytope, Shape, Status, is_compact_nonempty, lp_feasible_with_equalities


class Mode(enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class Outcome(enum.Enum):
    ALL_ESCAPE = "all_escape"
    TRAPPED_POINT_EXISTS = "trapped_point_exists"
    INVALID_POLYTOPE = "invalid_polytope"


@dataclass(frozen=True)
class Instance:
    """Dynamics x' = Ax + a (or x_{n+1} = Ax_n + a) over the polytope {Bx <= c}."""

    A: Matrix
    polytope: Polytope
    mode: Mode = Mode.CONTINUOUS
    affine: Vector | None = None

    def __post_init__(self):
        object.__setattr__(self, "A", to_matrix(self.A))
        if self.affine is not None:
            affine = to_vector(self.affine)
            object.__setattr__(self, "affine", affine if any(affine) else None)
        d = len(self.A)
        if any(len(row) != d for row in self.A):
            raise ValueError("A must be square")
        if self.polytope.dimension != d:
            raise ValueError(f"A is {d}x{d} but the polytope lives in dimension {self.polytope.dimension}")
        if self.affine is not None and len(self.affine) != d:
            raise ValueError("affine term has the wrong length")

    @property
    def dimension(self) -> int:
        return len(self.A)

    def bit_size(self) -> int:
        parts = [bit_size(self.A), self.polytope.bit_size()]
        if self.affine is not None:
            parts.append(bit_size(self.affine))
        return max(parts)

    def homogenized(self) -> "Instance":
        """Linear instance in dimension d+1 on the slice x_{d+1} = 1.

        The extra coordinate is constant: its derivative is 0 in continuous
        mode and it maps to itself in discrete mode.
        """
        if self.affine is None:
            return self
        d = self.dimension
        last = Fraction(0) if self.mode is Mode.CONTINUOUS else Fraction(1)
        a_rows = [tuple(row) + (self.affine[i],) for i, row in enumerate(self.A)]
        a_rows.append(tuple([Fraction(0)] * d) + (last,))
        b_rows = [tuple(row) + (Fraction(0),) for row in self.polytope.B]
        e = tuple([Fraction(0)] * d)
        b_rows += [e + (Fraction(1),), e + (Fraction(-1),)]
        c = tuple(self.polytope.c) + (Fraction(1), Fraction(-1))
        return Instance(a_rows, Polytope(b_rows, c), self.mode)


@dataclass(frozen=True)
class Decision:
    outcome: Outcome
    witness: Vector | None = None
    polytope_shape: Shape = Shape.COMPACT_NONEMPTY

    @property
    def all_escape(self) -> bool:
        return self.outcome is Outcome.ALL_ESCAPE


def dynamics_matrix(a: Matrix, mode: Mode) -> Matrix:
    """The matrix whose kernel is the fixed-point set."""
    return a if mode is Mode.CONTINUOUS else mat_sub(a, identity(len(a)))


def fixed_point_set(a: Sequence[Sequence], mode: Mode = Mode.CONTINUOUS) -> Matrix:
    """Kernel basis (as columns) of A, or of A - I in discrete mode."""
    return kernel(dynamics_matrix(to_matrix(a), mode))


def is_fixed_point(inst: Instance, x: Sequence) -> bool:
    x = to_vector(x)
    image = mat_vec(inst.A, x)
    if inst.affine is not None:
        image = tuple(v + a for v, a in zip(image, inst.affine))
    if inst.mode is Mode.CONTINUOUS:
        return all(v == 0 for v in image)
    return image == x


def decide(inst: Instance) -> Decision:
    shape = is_compact_nonempty(inst.polytope)
    if shape is not Shape.COMPACT_NONEMPTY:
        return Decision(Outcome.INVALID_POLYTOPE, None, shape)
    work = inst.homogenized()
    d = inst.dimension
    m = dynamics_matrix(work.A, work.mode)
    out = lp_feasible_with_equalities(work.polytope, m, [0] * len(m))
    if out.status is Status.INFEASIBLE:
        return Decision(Outcome.ALL_ESCAPE)
    witness = out.witness[:d]
    return Decision(Outcome.TRAPPED_POINT_EXISTS, witness)
