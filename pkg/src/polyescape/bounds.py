"""Uniform escape-time and iteration-count bounds.

The continuous bound is ``T_c + T_r``: ``T_c`` is the time after which the
convex hull of any trajectory contains a point with no component along
non-real eigenvalues, and ``T_r = 2 max T_lambda`` bounds escape for
trajectories in the real eigenspace.  Each ``T_lambda`` depends on the
eigenvalue's sign, its index ``k`` and the hypercube ratio ``C/eps``.
The discrete bound maps positive eigenvalues through the logarithm and adds
``d`` steps for the negative and nilpotent parts.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from . import directed
from .decide import Instance, Mode, Outcome, decide
from .heights import inverse_eigenvalue_lower
from .logscale import LogScale, maximum
from .spectrum import (
    DEFAULT_PRECISION,
    EigenvalueEnclosure,
    Kind,
    Sign,
    Spectrum,
    real_part_sign,
    spectrum,
)

RATIO_CONSTANT = 640
EXACT_TOWER_BITS = 100_000


class BoundError(RuntimeError):
    """Base class for failures while assembling a certificate."""


class PreconditionError(BoundError):
    """The instance is not a positive (all-escape) instance of the right mode."""


class UncertifiedSign(BoundError):
    pass


class UncertifiedTheta(BoundError):
    pass


@dataclass(frozen=True)
class EigenvalueTerm:
    eigenvalue: str
    case: str  # negative | zero | positive | complex | convex_hull | nilpotent
    index: int
    t_lambda: LogScale
    magnitude_lower: Fraction | None = None
    source: str = "enclosure"

    def to_json(self) -> dict:
        return {
            "eigenvalue": self.eigenvalue,
            "case": self.case,
            "index": self.index,
            "t_lambda": self.t_lambda.to_json(),
            "magnitude_lower": None if self.magnitude_lower is None else str(self.magnitude_lower),
            "source": self.source,
        }

    @classmethod
    def from_json(cls, data: dict) -> "EigenvalueTerm":
        mag = data.get("magnitude_lower")
        return cls(
            data["eigenvalue"],
            data["case"],
            data["index"],
            LogScale.from_json(data["t_lambda"]),
            None if mag is None else Fraction(mag),
            data.get("source", "enclosure"),
        )


@dataclass(frozen=True)
class EscapeCertificate:
    mode: Mode
    total_bound: LogScale
    complex_hull_time: LogScale
    ratio_bound: LogScale
    per_eigenvalue: tuple[EigenvalueTerm, ...]
    real_bound: LogScale
    bit_size: int
    dimension: int
    closed_form_log: Fraction
    dominated_by_closed_form: bool
    special_case: tuple[str, ...] = ()
    special_case_estimate: LogScale | None = None
    ratio_source: str = "formula"
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "total_bound": self.total_bound.to_json(),
            "complex_hull_time": self.complex_hull_time.to_json(),
            "ratio_bound": self.ratio_bound.to_json(),
            "real_bound": self.real_bound.to_json(),
            "per_eigenvalue": [t.to_json() for t in self.per_eigenvalue],
            "bit_size": self.bit_size,
            "dimension": self.dimension,
            "closed_form": {
                "log": str(self.closed_form_log),
                "formula": "4*exp(640*b*d^(4d+10))",
                "display": LogScale.from_log(self.closed_form_log).display(),
            },
            "dominated_by_closed_form": self.dominated_by_closed_form,
            "special_case": list(self.special_case),
            "special_case_estimate": None
            if self.special_case_estimate is None
            else self.special_case_estimate.to_json(),
            "ratio_source": self.ratio_source,
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, data: dict) -> "EscapeCertificate":
        est = data.get("special_case_estimate")
        return cls(
            mode=Mode(data["mode"]),
            total_bound=LogScale.from_json(data["total_bound"]),
            complex_hull_time=LogScale.from_json(data["complex_hull_time"]),
            ratio_bound=LogScale.from_json(data["ratio_bound"]),
            per_eigenvalue=tuple(EigenvalueTerm.from_json(t) for t in data["per_eigenvalue"]),
            real_bound=LogScale.from_json(data["real_bound"]),
            bit_size=data["bit_size"],
            dimension=data["dimension"],
            closed_form_log=Fraction(data["closed_form"]["log"]),
            dominated_by_closed_form=data["dominated_by_closed_form"],
            special_case=tuple(data.get("special_case", ())),
            special_case_estimate=None if est is None else LogScale.from_json(est),
            ratio_source=data.get("ratio_source", "formula"),
            notes=tuple(data.get("notes", ())),
        )


# -- formula pieces ------------------------------------------------------------


def ratio_bound_formula(b: int, d: int) -> LogScale:
    """C/eps <= exp(640 b d^(3d+8))."""
    if b < 1 or d < 1:
        raise ValueError("b and d must be at least 1")
    return LogScale.from_log(RATIO_CONSTANT * b * d ** (3 * d + 8))


def closed_form_log(b: int, d: int) -> Fraction:
    """Natural log of the global bound 4 exp(640 b d^(4d+10)), rounded up."""
    return RATIO_CONSTANT * b * d ** (4 * d + 10) + directed.log_upper(4)


def _closed_form_log_lower(b: int, d: int) -> Fraction:
    return RATIO_CONSTANT * b * d ** (4 * d + 10) + directed.log_lower(4)


def _log_k_ratio(k: int, ratio: LogScale) -> Fraction:
    # upper bound on log(k * C/eps)
    return directed.log_upper(k) + ratio.log_upper()


def log_inequality_threshold(a, b) -> Fraction:
    """t >= a log t + b holds for every t >= 4a log(2a) + 2b (a >= 1, b > 0)."""
    a, b = Fraction(a), Fraction(b)
    if a < 1 or b < 0:
        raise ValueError("need a >= 1 and b >= 0")
    return 4 * a * directed.log_upper(2 * a) + 2 * b


def t_lambda_negative(k: int, lambda_abs_lower, ratio: LogScale) -> LogScale:
    """Time for a decaying block of size k to shrink below eps.

    Uses max(1, 4a log(2a) + 2b) with a = max(1, k/|lambda|) and
    b = log(kC/eps)/|lambda|, which needs none of the simplifying
    assumptions behind the shorter closed form.
    """
    lam = Fraction(lambda_abs_lower)
    if lam <= 0 or k < 1:
        raise ValueError("need |lambda| > 0 and k >= 1")
    a = max(Fraction(1), Fraction(k) / lam)
    b = _log_k_ratio(k, ratio) / lam
    return LogScale.exact(max(Fraction(1), log_inequality_threshold(a, b)))


def t_lambda_zero(k: int, ratio: LogScale) -> LogScale:
    """(1/k) (k^2 C/eps)^(2^(k-1)), evaluated exactly when feasible."""
    if k < 1:
        raise ValueError("k must be at least 1")
    power = 1 << (k - 1)
    if ratio.is_exact:
        base = k * k * ratio.value
        if power * max(1, base.numerator.bit_length()) <= EXACT_TOWER_BITS:
            return LogScale.exact(base**power / k)
    log = power * (2 * directed.log_upper(k) + ratio.log_upper()) - directed.log_lower(k)
    return LogScale.from_log(log)


def t_lambda_positive(k: int, lambda_lower, ratio: LogScale) -> LogScale:
    """(2^(k-1) / lambda) log(kC/eps) for a growing block of size k."""
    lam = Fraction(lambda_lower)
    if lam <= 0 or k < 1:
        raise ValueError("need lambda > 0 and k >= 1")
    return LogScale.exact(Fraction(1 << (k - 1)) / lam * _log_k_ratio(k, ratio))


def _positive_side_condition(k: int, lam: Fraction, ratio: LogScale) -> bool:
    # the chained argument for k >= 2 assumes log(kC/eps) > 4k log(2k/lambda)
    if k == 1:
        return True
    inner = 2 * k / lam
    rhs = 4 * k * directed.log_upper(inner) if inner > 1 else Fraction(0)
    return directed.log_lower(k) + ratio.log_lower() > rhs


def _t_lambda_positive_safe(k: int, lam: Fraction, ratio: LogScale) -> LogScale:
    first = max(_log_k_ratio(k, ratio) / lam, 4 * k / lam * directed.log_upper(max(Fraction(2), 2 * k / lam)))
    return LogScale.exact(Fraction(1 << (k - 1)) * first)


def complex_hull_time(s: Spectrum, theta_fallback: Fraction | None = None) -> LogScale:
    """Sum over non-real pairs of index * pi / theta, with theta rounded down."""
    pi_hi = directed.pi_upper()
    total = Fraction(0)
    for e in s.complex_pairs:
        theta = e.imag_interval[0]
        if theta <= 0:
            if theta_fallback is None:
                raise UncertifiedTheta(f"imaginary part of {e.describe()} is not certified positive")
            theta = theta_fallback
        total += e.index * pi_hi / theta
    return LogScale.exact(total)


def _real_term(e: EigenvalueEnclosure, ratio: LogScale, fallback: Fraction | None) -> EigenvalueTerm:
    sign = real_part_sign(e)
    k = e.index
    if sign is Sign.ZERO_UNCERTIFIED:
        raise UncertifiedSign(f"sign of eigenvalue {e.describe()} is not certified")
    if sign is Sign.ZERO:
        return EigenvalueTerm(e.describe(), "zero", k, t_lambda_zero(k, ratio))
    mag = e.abs_real_lower
    source = "enclosure"
    if mag <= 0:
        if fallback is None:
            raise UncertifiedSign(f"no positive lower bound on |{e.describe()}|")
        mag, source = fallback, "height_fallback"
    if sign is Sign.NEGATIVE:
        return EigenvalueTerm(e.describe(), "negative", k, t_lambda_negative(k, mag, ratio), mag, source)
    if _positive_side_condition(k, mag, ratio):
        t = t_lambda_positive(k, mag, ratio)
    else:
        t, source = _t_lambda_positive_safe(k, mag, ratio), source + "+safe_form"
    return EigenvalueTerm(e.describe(), "positive", k, t, mag, source)


def real_escape_bound(s: Spectrum, ratio: LogScale, fallback: Fraction | None = None) -> tuple[LogScale, list[EigenvalueTerm]]:
    """T_r = 2 max T_lambda over the real eigenvalues (0 when there are none)."""
    terms = [_real_term(e, ratio, fallback) for e in s.real]
    if not terms:
        return LogScale.exact(0), terms
    return maximum(*(t.t_lambda for t in terms)).scale(2), terms


def _dominance(total: LogScale, b: int, d: int) -> bool:
    if total.is_zero:
        return True
    return total.log_upper() <= _closed_form_log_lower(b, d)


def _special_case(s: Spectrum, b: int, d: int) -> tuple[tuple[str, ...], LogScale | None]:
    cases = []
    if s.diagonalizable:
        cases.append("diagonalizable")
    if not s.has_zero:
        cases.append("invertible")
    if not cases:
        return (), None
    exponent = b * d * d
    est = LogScale.exact(4**exponent) if exponent <= 5000 else LogScale.from_log(exponent * directed.log_upper(4))
    return tuple(cases), est


def _require(inst: Instance, mode: Mode):
    if inst.mode is not mode:
        raise PreconditionError(f"instance mode is {inst.mode.value}, expected {mode.value}")
    decision = decide(inst)
    if decision.outcome is not Outcome.ALL_ESCAPE:
        raise PreconditionError(f"bound requires an all-escape instance, decision was {decision.outcome.value}")


def continuous_escape_bound(inst: Instance, precision_bits: int = DEFAULT_PRECISION) -> EscapeCertificate:
    """Certificate for a positive continuous instance: T = T_c + T_r."""
    _require(inst, Mode.CONTINUOUS)
    work = inst.homogenized()
    b, d = work.bit_size(), work.dimension
    eig = spectrum(work.A, precision_bits)
    ratio = ratio_bound_formula(b, d)
    fallback = inverse_eigenvalue_lower(d, b)
    t_c = complex_hull_time(eig, fallback)
    t_r, terms = real_escape_bound(eig, ratio, fallback)
    terms += [
        EigenvalueTerm(e.describe(), "complex", e.index, LogScale.exact(e.index * directed.pi_upper() / e.imag_interval[0]))
        for e in eig.complex_pairs
    ]
    total = t_c + t_r
    notes = []
    if inst.affine is not None:
        notes.append("affine term homogenized: dimension raised by one")
    if not eig.real:
        notes.append("no real eigenvalues: real-subspace bound is vacuous, total is T_c alone")
    if d < 4:
        notes.append("d < 4: the characteristic-polynomial coefficient bound is used below d = 4, where it is not proven")
    dominated = _dominance(total, b, d)
    if not dominated:
        raise BoundError("assembled bound exceeds the global closed form; this should be impossible")
    cases, est = _special_case(eig, b, d)
    return EscapeCertificate(
        mode=Mode.CONTINUOUS,
        total_bound=total,
        complex_hull_time=t_c,
        ratio_bound=ratio,
        per_eigenvalue=tuple(terms),
        real_bound=t_r,
        bit_size=b,
        dimension=d,
        closed_form_log=closed_form_log(b, d),
        dominated_by_closed_form=dominated,
        special_case=cases,
        special_case_estimate=est,
        notes=tuple(notes),
    )


def _log_interval_of(e: EigenvalueEnclosure) -> tuple[Fraction, Fraction]:
    lo, hi = e.real_interval
    return directed.log_lower(lo), directed.log_upper(hi)


def discrete_escape_bound(inst: Instance, precision_bits: int = DEFAULT_PRECISION) -> EscapeCertificate:
    """Iteration bound N = ceil(T) + d for a positive discrete instance.

    Positive real eigenvalues lambda become log(lambda) for the continuous
    analysis (1 maps to the zero case).  Negative and zero eigenvalues are
    covered by the additive d.  Non-real eigenvalues contribute
    index * pi / arg(lambda) to the hull time.
    """
    _require(inst, Mode.DISCRETE)
    work = inst.homogenized()
    b, d = work.bit_size(), work.dimension
    eig = spectrum(work.A, precision_bits)
    ratio = ratio_bound_formula(b, d)
    fallback = inverse_eigenvalue_lower(d, b)
    pi_hi = directed.pi_upper()
    terms = []
    real_terms = []
    t_c = Fraction(0)
    for e in eig.eigenvalues:
        k = e.index
        if e.kind is Kind.ZERO:
            terms.append(EigenvalueTerm(e.describe(), "nilpotent", k, LogScale.exact(0)))
        elif e.kind is Kind.NEGATIVE_REAL:
            terms.append(EigenvalueTerm(e.describe(), "convex_hull", k, LogScale.exact(0)))
        elif e.kind is Kind.COMPLEX_PAIR:
            (re_lo, re_hi), (im_lo, im_hi) = e.real_interval, e.imag_interval
            modulus_hi = directed.sqrt_upper(max(re_lo * re_lo, re_hi * re_hi) + im_hi * im_hi)
            # arg(z) >= sin(arg z) = Im z / |z| on the upper half plane
            arg_lo = im_lo / modulus_hi if im_lo > 0 else fallback
            piece = k * pi_hi / arg_lo
            t_c += piece
            terms.append(EigenvalueTerm(e.describe(), "complex", k, LogScale.exact(piece), arg_lo))
        else:
            lo, hi = e.real_interval
            if lo == hi == 1:
                term = EigenvalueTerm(e.describe(), "zero", k, t_lambda_zero(k, ratio))
            elif hi < 1:
                mag = -directed.log_upper(hi)
                source = "enclosure"
                if mag <= 0:
                    mag, source = fallback, "height_fallback"
                term = EigenvalueTerm(e.describe(), "negative", k, t_lambda_negative(k, mag, ratio), mag, source)
            elif lo > 1:
                mag = directed.log_lower(lo)
                source = "enclosure"
                if mag <= 0:
                    mag, source = fallback, "height_fallback"
                if _positive_side_condition(k, mag, ratio):
                    t = t_lambda_positive(k, mag, ratio)
                else:
                    t, source = _t_lambda_positive_safe(k, mag, ratio), source + "+safe_form"
                term = EigenvalueTerm(e.describe(), "positive", k, t, mag, source)
            else:
                raise UncertifiedSign(f"cannot decide whether {e.describe()} is above or below 1")
            terms.append(term)
            real_terms.append(term)
    if real_terms:
        t_r = maximum(*(t.t_lambda for t in real_terms)).scale(2)
    else:
        t_r = LogScale.exact(0)
    t_c_scale = LogScale.exact(t_c)
    t_cont = t_c_scale + t_r
    total = (t_cont.ceil() if t_cont.is_exact else t_cont) + LogScale.exact(d)
    if total.is_exact:
        total = LogScale.exact(ceil(total.value))
    notes = ["N = ceil(T_c + T_r) + d; negative and zero eigenvalues handled by the additive d"]
    if inst.affine is not None:
        notes.append("affine term homogenized: dimension raised by one")
    dominated = _dominance(total, b, d)
    cases, est = _special_case(eig, b, d)
    return EscapeCertificate(
        mode=Mode.DISCRETE,
        total_bound=total,
        complex_hull_time=t_c_scale,
        ratio_bound=ratio,
        per_eigenvalue=tuple(terms),
        real_bound=t_r,
        bit_size=b,
        dimension=d,
        closed_form_log=closed_form_log(b, d),
        dominated_by_closed_form=dominated,
        special_case=cases,
        special_case_estimate=est,
        notes=tuple(notes),
    )


def escape_bound(inst: Instance, precision_bits: int = DEFAULT_PRECISION) -> EscapeCertificate:
    if inst.mode is Mode.CONTINUOUS:
        return continuous_escape_bound(inst, precision_bits)
    return discrete_escape_bound(inst, precision_bits)
