"""Empirical harness: trajectories, escape detection and certificate checks.

Continuous trajectories are scanned coarsely in float64, the exit bracket is
bisected in float64, and the reported exit time is then confirmed with a
high-precision matrix exponential carrying an explicit error bound.  An exit
counts only when a constraint is violated by more than that bound, so points
on the boundary stay inside.  Discrete orbits are iterated exactly.
"""

import csv
import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath
import numpy as np

from .bounds import EscapeCertificate
from .decide import Instance, Mode, Outcome, decide
from .linalg import Vector, mat_vec, to_vector
from .lp import Polytope, Status, solve_standard, vertices
from .spectrum import mpf_to_fraction

DEFAULT_PRECISION = 128
MAX_PRECISION = 4096
DEFAULT_SIM_CAP = 10**6
SCAN_STEPS = 10_000
TIME_RESOLUTION = Fraction(1, 1 << 30)
HORIZON_LADDER = (1, 100, 10**4, 10**6)
_BLOCK = 100


class PrecisionExhausted(RuntimeError):
    pass


@dataclass
class MatrixExp:
    """High-precision exp(At) with an upper bound on the max-row-sum error."""

    matrix: mpmath.matrix
    error: mpmath.mpf
    work_bits: int


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _norm_inf(m) -> mpmath.mpf:
    return max(sum(abs(m[i, j]) for j in range(m.cols)) for i in range(m.rows))


def _expm_attempt(a, t, work_bits: int) -> MatrixExp:
    with mpmath.workprec(work_bits):
        n = len(a)
        x = mpmath.matrix([[_to_mpf(v) for v in row] for row in a]) * _to_mpf(t)
        norm = _norm_inf(x) if n else mpmath.mpf(0)
        s = 0
        while norm / (1 << s) > 0.5:
            s += 1
        x = x / (1 << s)
        xn = norm / (1 << s)
        eye = mpmath.eye(n)
        total, term = eye.copy(), eye.copy()
        tol = mpmath.ldexp(1, -work_bits)
        k = 0
        while True:
            k += 1
            term = term * x / k
            total += term
            # the remaining tail is at most twice the next term's norm bound
            tail = 2 * xn ** (k + 1) / mpmath.factorial(k + 1)
            if tail < tol or xn == 0:
                break
        unit = mpmath.ldexp(1, -(work_bits - 4))
        err = tail + unit * (k + 2) * n * mpmath.exp(xn)
        for _ in range(s):
            size = _norm_inf(total) + err
            total = total * total
            err = 2 * size * err + err * err + unit * n * size * size
        return MatrixExp(total, err * (1 + unit), work_bits)


def matrix_exp(a: Sequence[Sequence], t, precision_bits: int = DEFAULT_PRECISION) -> MatrixExp:
    """exp(A t) by scaling and squaring with a Taylor core.

    Entries of ``a`` and ``t`` may be rationals or mpmath numbers.  The working
    precision doubles until the error bound is at most
    2^(-precision_bits/2) * max(1, ||exp(At)||).
    """
    work = precision_bits + 32
    while work <= MAX_PRECISION + 32:
        res = _expm_attempt(a, t, work)
        with mpmath.workprec(work):
            scale = max(mpmath.mpf(1), _norm_inf(res.matrix)) if len(a) else mpmath.mpf(1)
            if res.error <= scale * mpmath.ldexp(1, -(precision_bits // 2)):
                return res
        work *= 2
    raise PrecisionExhausted(f"exp(At) at t={t} needs more than {MAX_PRECISION} bits")


def _expm_float(a: np.ndarray, t: float) -> np.ndarray:
    x = a * t
    norm = np.abs(x).sum(axis=1).max() if x.size else 0.0
    s = 0
    while norm / 2**s > 0.5:
        s += 1
    x = x / 2**s
    total = np.eye(len(a))
    term = np.eye(len(a))
    for k in range(1, 20):
        term = term @ x / k
        total = total + term
    for _ in range(s):
        total = total @ total
    return total


# -- runs ------------------------------------------------------------------------


@dataclass
class TrajectoryRun:
    initial_point: Vector
    mode: Mode
    escape_time: Fraction | int | None  # None: not escaped within the horizon
    horizon: Fraction | int
    precision_bits: int
    samples: list = field(default_factory=list)  # (time, point floats, inside)

    @property
    def escaped(self) -> bool:
        return self.escape_time is not None

    def to_json(self) -> dict:
        return {
            "initial_point": [str(v) for v in self.initial_point],
            "mode": self.mode.value,
            "escaped": self.escaped,
            "escape_time": None if self.escape_time is None else str(self.escape_time),
            "escape_time_float": None if self.escape_time is None else float(self.escape_time),
            "horizon": str(self.horizon),
            "precision_bits": self.precision_bits,
        }


class _Checker:
    """Exit tests for one linear (homogenized) instance."""

    def __init__(self, work: Instance, precision_bits: int):
        self.work = work
        self.bits = precision_bits
        self.a = work.A
        self.a_f = np.array([[float(v) for v in row] for row in work.A], dtype=float)
        self.b_f = np.array([[float(v) for v in row] for row in work.polytope.B], dtype=float)
        self.c_f = np.array([float(v) for v in work.polytope.c], dtype=float)
        self.row_l1 = [sum(abs(v) for v in row) for row in work.polytope.B]

    def float_outside(self, points: np.ndarray) -> np.ndarray:
        # points has shape (k, d); loose tolerance, exits are confirmed later
        lhs = points @ self.b_f.T
        scale = 1.0 + np.abs(self.c_f) + np.abs(points) @ np.abs(self.b_f).T
        bad = lhs - self.c_f > 1e-12 * scale
        return ~np.isfinite(lhs).all(axis=1) | bad.any(axis=1)

    def certified_outside(self, x0: Vector, t: Fraction) -> bool:
        e = matrix_exp(self.a, t, self.bits)
        with mpmath.workprec(e.work_bits):
            x = [_to_mpf(v) for v in x0]
            xnorm = max((abs(v) for v in x), default=mpmath.mpf(0))
            y = e.matrix * mpmath.matrix(x)
            unit = mpmath.ldexp(1, -(e.work_bits - 8))
            for row, ci, l1 in zip(self.work.polytope.B, self.work.polytope.c, self.row_l1):
                val = mpmath.fsum(_to_mpf(r) * y[j] for j, r in enumerate(row)) - _to_mpf(ci)
                radius = _to_mpf(l1) * (e.error * xnorm + unit * (1 + mpmath.fsum(abs(v) for v in y)))
                radius += unit * abs(_to_mpf(ci))
                if val > radius:
                    return True
        return False


def _float_bisect(chk: _Checker, x_lo: np.ndarray, t_lo: float, t_hi: float) -> float:
    """Shrink [t_lo, t_hi] (inside at t_lo, outside at t_hi) to the time resolution."""
    res = float(TIME_RESOLUTION)
    lo, hi = 0.0, t_hi - t_lo
    while hi - lo > res:
        mid = (lo + hi) / 2
        point = _expm_float(chk.a_f, mid) @ x_lo
        if chk.float_outside(point[None, :])[0]:
            hi = mid
        else:
            lo = mid
    return t_lo + hi


def _confirm(chk: _Checker, x0: Vector, t: float) -> Fraction | None:
    """Smallest grid time at or after t (within a few nudges) with a certified exit."""
    base = Fraction(t).limit_denominator(1 << 40)
    base = Fraction(-((-base) // TIME_RESOLUTION)) * TIME_RESOLUTION
    step = TIME_RESOLUTION
    for _ in range(24):
        if chk.certified_outside(x0, base):
            return base
        base += step
        step *= 2
    return None


def _scan_rung(chk: _Checker, x0: Vector, horizon: Fraction, record: bool):
    """Scan [0, horizon] with SCAN_STEPS float steps; returns (exit time, samples)."""
    h = float(horizon) / SCAN_STEPS
    step = _expm_float(chk.a_f, h)
    powers = [step]
    for _ in range(_BLOCK - 1):
        powers.append(powers[-1] @ step)
    stack = np.stack(powers)
    x = np.array([float(v) for v in x0])
    samples = [(0.0, x.copy(), True)] if record else []
    done = 0
    while done < SCAN_STEPS:
        count = min(_BLOCK, SCAN_STEPS - done)
        block = stack[:count] @ x
        outside = chk.float_outside(block)
        for j in np.flatnonzero(outside):
            k = done + j + 1
            prev = x if j == 0 else block[j - 1]
            t_exit = _float_bisect(chk, prev, (k - 1) * h, k * h) if np.isfinite(prev).all() else k * h
            confirmed = _confirm(chk, x0, t_exit)
            if confirmed is not None and confirmed <= horizon:
                if record:
                    samples += [((done + i + 1) * h, block[i], True) for i in range(j)]
                    final = _expm_float(chk.a_f, float(confirmed)) @ samples[0][1]
                    samples.append((float(confirmed), final, False))
                return confirmed, samples
        if record:
            samples += [((done + i + 1) * h, block[i], not outside[i]) for i in range(count)]
        x = block[-1]
        done += count
        if not np.isfinite(x).all():
            break
    return None, samples


def _ladder(horizon: Fraction) -> list[Fraction]:
    rungs = [Fraction(r) for r in HORIZON_LADDER if r < horizon]
    return rungs + [Fraction(horizon)]


def _lift(inst: Instance, x0: Vector) -> Vector:
    return x0 + (Fraction(1),) if inst.affine is not None else x0


def escape_time(inst: Instance, x0: Sequence, horizon=DEFAULT_SIM_CAP, precision_bits: int = DEFAULT_PRECISION, record: bool = False) -> TrajectoryRun:
    """First detected exit of the trajectory from x0, up to ``horizon``.

    Continuous mode returns an exact rational time at which the state is
    certified outside P; earlier sampled times were inside up to the float
    scan.  Discrete mode returns the first n with x_n outside P.
    """
    x0 = to_vector(x0)
    if not inst.polytope.contains(x0):
        raise ValueError("initial point is not in the polytope")
    horizon = Fraction(horizon)
    work = inst.homogenized()
    start = _lift(inst, x0)
    if inst.mode is Mode.DISCRETE:
        return _discrete_run(inst, work, x0, start, int(horizon), record)
    chk = _Checker(work, precision_bits)
    samples = []
    for rung in _ladder(horizon):
        t, samples = _scan_rung(chk, start, rung, record)
        if t is not None:
            break
    d = inst.dimension
    samples = [(s_t, tuple(float(v) for v in p[:d]), inside) for s_t, p, inside in samples]
    return TrajectoryRun(x0, Mode.CONTINUOUS, t, horizon, precision_bits, samples)


def _discrete_run(inst: Instance, work: Instance, x0: Vector, start: Vector, steps: int, record: bool) -> TrajectoryRun:
    d = inst.dimension
    x = start
    samples = [(0, tuple(float(v) for v in x0), True)] if record else []
    for n in range(1, steps + 1):
        x = mat_vec(work.A, x)
        inside = work.polytope.contains(x)
        if record:
            samples.append((n, tuple(float(v) for v in x[:d]), inside))
        if not inside:
            return TrajectoryRun(x0, Mode.DISCRETE, n, steps, 0, samples)
    return TrajectoryRun(x0, Mode.DISCRETE, None, steps, 0, samples)


# -- sampling ------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingPlan:
    include_vertices: bool = True
    random_interior_count: int = 50
    seed: int = 0


def sample_points(p: Polytope, plan: SamplingPlan) -> list[Vector]:
    """Vertices plus random convex combinations of them, all checked exactly."""
    verts = vertices(p)
    if not verts:
        raise ValueError("polytope has no vertices")
    rng = random.Random(plan.seed)
    out = list(verts) if plan.include_vertices else []
    for _ in range(plan.random_interior_count):
        weights = [rng.randint(1, 1 << 16) for _ in verts]
        total = sum(weights)
        point = tuple(sum(Fraction(w, total) * v[i] for w, v in zip(weights, verts)) for i in range(p.dimension))
        out.append(point)
    for x in out:
        if not p.contains(x):
            raise AssertionError(f"sample {x} is outside the polytope")
    return out


# -- convex hull membership ----------------------------------------------------------


def hull_contains_origin(points: Sequence[Sequence], tolerance=Fraction(0)) -> bool:
    """Whether 0 is a convex combination of the points.

    Rational inputs with zero tolerance give an exact answer.  Otherwise each
    coordinate of the combination may deviate from 0 by at most ``tolerance``;
    inputs may then be mpmath numbers and are rounded to a grid about 4000
    times finer than the tolerance.
    """
    if not points:
        raise ValueError("need at least one point")
    tol = Fraction(tolerance)
    if tol == 0:
        pts = [tuple(Fraction(v) for v in p) for p in points]
    else:
        # snap to a dyadic grid far below the tolerance to keep the LP small
        grid = 1 << (tol.denominator.bit_length() - tol.numerator.bit_length() + 12)
        pts = [tuple(Fraction(round((mpf_to_fraction(v) if isinstance(v, mpmath.mpf) else Fraction(v)) * grid), grid) for v in p) for p in points]
    d, n = len(pts[0]), len(pts)
    a_eq, b_eq = [[1] * n], [1]
    a_ub, b_ub = [], []
    for i in range(d):
        row = [p[i] for p in pts]
        if tol == 0:
            a_eq.append(row)
            b_eq.append(0)
        else:
            a_ub += [row, [-v for v in row]]
            b_ub += [tol, tol]
    status, *_ = solve_standard(a_ub, b_ub, a_eq, b_eq, [0] * n, n)
    return status is not Status.INFEASIBLE


# -- certificate validation ------------------------------------------------------------


class ValidationStatus(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    EXISTENCE_ONLY = "existence_only"
    REFUSED = "refused"


@dataclass
class ValidationReport:
    status: ValidationStatus
    message: str
    bound_display: str = ""
    sim_cap: int | Fraction = DEFAULT_SIM_CAP
    horizon: Fraction | None = None
    runs: int = 0
    escaped: int = 0
    max_observed: Fraction | int | None = None
    slack_ratio: float | None = None
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in (ValidationStatus.PASS, ValidationStatus.EXISTENCE_ONLY)

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "message": self.message,
            "bound": self.bound_display,
            "sim_cap": str(self.sim_cap),
            "horizon": None if self.horizon is None else str(self.horizon),
            "runs": self.runs,
            "escaped": self.escaped,
            "max_observed": None if self.max_observed is None else str(self.max_observed),
            "max_observed_float": None if self.max_observed is None else float(self.max_observed),
            "slack_ratio": self.slack_ratio,
            "failures": [[str(v) for v in x] for x in self.failures],
        }


def validate_certificate(
    inst: Instance,
    cert: EscapeCertificate,
    plan: SamplingPlan = SamplingPlan(),
    sim_cap=DEFAULT_SIM_CAP,
    precision_bits: int = DEFAULT_PRECISION,
) -> ValidationReport:
    """Check sampled trajectories against the certified bound.

    When the bound is at most ``sim_cap`` every sample must escape by then;
    otherwise samples are only checked to escape within ``sim_cap``.
    """
    decision = decide(inst)
    if decision.outcome is not Outcome.ALL_ESCAPE:
        return ValidationReport(ValidationStatus.REFUSED, f"instance is not all-escape ({decision.outcome.value})")
    if cert.mode is not inst.mode:
        return ValidationReport(ValidationStatus.REFUSED, "certificate mode does not match the instance")
    sim_cap = Fraction(sim_cap)
    bound = cert.total_bound.materialize()
    simulable = bound is not None and bound <= sim_cap
    horizon = bound if simulable else sim_cap
    if inst.mode is Mode.DISCRETE:
        horizon = Fraction(int(horizon))
    report = ValidationReport(ValidationStatus.PASS, "", cert.total_bound.display(), sim_cap, horizon)
    for x0 in sample_points(inst.polytope, plan):
        run = escape_time(inst, x0, horizon, precision_bits)
        report.runs += 1
        if run.escaped:
            report.escaped += 1
            if report.max_observed is None or run.escape_time > report.max_observed:
                report.max_observed = run.escape_time
        else:
            report.failures.append(x0)
    if report.max_observed and bound is not None:
        report.slack_ratio = float(bound / Fraction(report.max_observed))
    if report.failures and simulable:
        report.status = ValidationStatus.FAIL
        report.message = f"{len(report.failures)} of {report.runs} samples stayed inside past the bound {report.bound_display}"
    elif not simulable:
        report.status = ValidationStatus.EXISTENCE_ONLY
        report.message = (
            f"bound {report.bound_display} exceeds the simulation cap; "
            f"{report.escaped} of {report.runs} samples confirmed to escape within {sim_cap}"
        )
    else:
        report.message = f"all {report.runs} samples escaped by {report.max_observed} <= bound {report.bound_display}"
    return report


def write_trace(run: TrajectoryRun, path) -> None:
    """CSV with header t,x1,...,xd,inside, one row per recorded sample."""
    d = len(run.initial_point)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(d)] + ["inside"])
        for t, point, inside in run.samples:
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in point] + [int(inside)])
