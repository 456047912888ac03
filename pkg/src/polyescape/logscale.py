"""Upper bounds that may be astronomically large.

A ``LogScale`` is a certified *upper bound* on some nonnegative quantity.  It
holds either an exact rational value, or a rational ``log`` meaning the bound
``exp(log)``.  All arithmetic rounds upward, so the result of combining
bounds is again a bound.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, log10

from . import directed

# exp(log) is materialized as a rational only below this exponent
MATERIALIZE_LIMIT = 20_000
# exact values above this many bits are converted to log form
EXACT_BIT_LIMIT = 200_000


@dataclass(frozen=True)
class LogScale:
    value: Fraction | None = None
    log: Fraction | None = None

    def __post_init__(self):
        if (self.value is None) == (self.log is None):
            raise ValueError("exactly one of value/log must be set")
        if self.value is not None:
            if self.value < 0:
                raise ValueError("LogScale holds nonnegative quantities")
            object.__setattr__(self, "value", Fraction(self.value))
        else:
            object.__setattr__(self, "log", Fraction(self.log))

    @classmethod
    def exact(cls, value) -> "LogScale":
        value = Fraction(value)
        if value.numerator.bit_length() - value.denominator.bit_length() > EXACT_BIT_LIMIT:
            return cls(log=directed.log_upper(value))
        return cls(value=value)

    @classmethod
    def from_log(cls, log) -> "LogScale":
        return cls(log=Fraction(log))

    @property
    def is_exact(self) -> bool:
        return self.value is not None

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def log_upper(self) -> Fraction:
        if self.value is not None:
            if self.value == 0:
                raise ValueError("log of zero bound")
            return directed.log_upper(self.value)
        return self.log

    def log_lower(self) -> Fraction:
        """Lower bound on the log of the bound itself (not of the quantity)."""
        if self.value is not None:
            if self.value == 0:
                raise ValueError("log of zero bound")
            return directed.log_lower(self.value)
        return self.log

    def certainly_le(self, other: "LogScale") -> bool:
        """True when this bound is provably no larger than ``other``."""
        if self.value is not None and other.value is not None:
            return self.value <= other.value
        if self.is_zero:
            return True
        if other.is_zero:
            return False
        return self.log_upper() <= other.log_lower()

    def __add__(self, other: "LogScale") -> "LogScale":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.value is not None and other.value is not None:
            return LogScale.exact(self.value + other.value)
        a, b = self.log_upper(), other.log_upper()
        hi, lo = max(a, b), min(a, b)
        gap = lo - hi
        # log(e^hi + e^lo) = hi + log(1 + e^gap) <= hi + e^gap
        bump = directed.exp_upper(gap) if gap > -MATERIALIZE_LIMIT else Fraction(1, 1 << 64)
        return LogScale.from_log(hi + bump)

    def scale(self, factor) -> "LogScale":
        """Multiply by a nonnegative rational."""
        factor = Fraction(factor)
        if factor == 0:
            return LogScale.exact(0)
        if self.value is not None:
            return LogScale.exact(self.value * factor)
        return LogScale.from_log(self.log + directed.log_upper(factor))

    def materialize(self) -> Fraction | None:
        """Rational upper bound, or None when the value is too large to write down."""
        if self.value is not None:
            return self.value
        if self.log > MATERIALIZE_LIMIT:
            return None
        return directed.exp_upper(self.log)

    def ceil(self) -> "LogScale":
        if self.value is not None:
            return LogScale.exact(ceil(self.value))
        return self

    def log10_estimate(self) -> float:
        if self.value is not None:
            if self.value == 0:
                return float("-inf")
            v = self.value
            return (v.numerator.bit_length() - v.denominator.bit_length()) * 0.30103 if v > 10**300 else log10(v)
        return float(self.log) / 2.302585092994046

    def display(self) -> str:
        if self.value is not None:
            if self.value.denominator == 1 and abs(self.value) < 10**15:
                return str(self.value.numerator)
            if self.value < 10**300:
                return f"{float(self.value):.10g}"
        e = self.log10_estimate()
        exponent = floor(e)
        mantissa = 10 ** (e - exponent)
        text = f"~{mantissa:.4f}e+{exponent}"
        if self.log is not None:
            text += f" (exp({float(self.log):.6g}))"
        return text

    def to_json(self) -> dict:
        if self.value is not None:
            return {"kind": "exact", "value": _frac_str(self.value), "display": self.display()}
        return {"kind": "log", "log": _frac_str(self.log), "display": self.display()}

    @classmethod
    def from_json(cls, data: dict) -> "LogScale":
        if data["kind"] == "exact":
            return cls(value=Fraction(data["value"]))
        return cls(log=Fraction(data["log"]))


def maximum(*items: LogScale) -> LogScale:
    """Upper bound on the maximum of several bounds."""
    best = items[0]
    for item in items[1:]:
        if best.certainly_le(item):
            best = item
        elif item.certainly_le(best):
            continue
        else:
            best = LogScale.from_log(max(best.log_upper(), item.log_upper()))
    return best


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
