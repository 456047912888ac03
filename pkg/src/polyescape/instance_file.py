"""JSON instance files and machine-readable reports."""

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .decide import Instance, Mode
from .lp import Polytope

MAX_FRACTION_DIGITS = 64
_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_DECIMAL = re.compile(r"^[+-]?\d*\.(\d+)$|^[+-]?\d+\.$")


class InstanceFormatError(ValueError):
    pass


def parse_rational(text) -> Fraction:
    """Exact value of "p", "-p", "p/q" or a decimal literal such as "1.01"."""
    if isinstance(text, bool):
        raise InstanceFormatError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InstanceFormatError(f"rationals must be strings, got {type(text).__name__} {text!r}")
    s = text.strip()
    if _RATIONAL.match(s):
        num, _, den = s.partition("/")
        if den and int(den) == 0:
            raise InstanceFormatError(f"zero denominator in {text!r}")
        return Fraction(s)
    m = _DECIMAL.match(s)
    if m:
        digits = m.group(1) or ""
        if len(digits) > MAX_FRACTION_DIGITS:
            raise InstanceFormatError(f"more than {MAX_FRACTION_DIGITS} fractional digits in {text!r}")
        return Fraction(s)
    raise InstanceFormatError(f"not a rational literal: {text!r}")


def _vector(data, name: str) -> tuple[Fraction, ...]:
    if not isinstance(data, list):
        raise InstanceFormatError(f"{name} must be an array")
    return tuple(parse_rational(v) for v in data)


def _matrix(data, name: str) -> tuple[tuple[Fraction, ...], ...]:
    if not isinstance(data, list) or not data:
        raise InstanceFormatError(f"{name} must be a nonempty 2-d array")
    rows = tuple(_vector(row, name) for row in data)
    if len({len(r) for r in rows}) != 1:
        raise InstanceFormatError(f"{name} has ragged rows")
    return rows


def instance_from_json(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise InstanceFormatError("instance must be a JSON object")
    missing = [k for k in ("A", "B", "c") if k not in data]
    if missing:
        raise InstanceFormatError(f"missing field(s): {', '.join(missing)}")
    a = _matrix(data["A"], "A")
    b = _matrix(data["B"], "B")
    c = _vector(data["c"], "c")
    affine = _vector(data["a"], "a") if data.get("a") is not None else None
    try:
        mode = Mode(data.get("mode", "continuous"))
    except ValueError:
        raise InstanceFormatError(f"mode must be 'continuous' or 'discrete', got {data.get('mode')!r}") from None
    if len(b) != len(c):
        raise InstanceFormatError(f"B has {len(b)} rows but c has {len(c)} entries")
    try:
        return Instance(a, Polytope(b, c), mode, affine)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def instance_to_json(inst: Instance) -> dict:
    out = {
        "A": [[str(v) for v in row] for row in inst.A],
        "B": [[str(v) for v in row] for row in inst.polytope.B],
        "c": [str(v) for v in inst.polytope.c],
        "mode": inst.mode.value,
    }
    if inst.affine is not None:
        out["a"] = [str(v) for v in inst.affine]
    return out


def load_instance(path) -> tuple[Instance, str]:
    """Parse an instance file; also returns the sha256 digest of its bytes."""
    raw = Path(path).read_bytes()
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InstanceFormatError(f"invalid JSON: {exc}") from None
    return instance_from_json(data), hashlib.sha256(raw).hexdigest()


@dataclass
class Report:
    command: str
    version: str
    input_digest: str
    decision: dict | None = None
    certificate: dict | None = None
    validation: dict | None = None
    runs: list | None = None
    notes: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "input_digest": self.input_digest,
            "decision": self.decision,
            "certificate": self.certificate,
            "validation": self.validation,
            "runs": self.runs,
            "notes": list(self.notes),
            "timings": dict(self.timings),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Report":
        return cls(
            command=data["command"],
            version=data["version"],
            input_digest=data["input_digest"],
            decision=data.get("decision"),
            certificate=data.get("certificate"),
            validation=data.get("validation"),
            runs=data.get("runs"),
            notes=list(data.get("notes", [])),
            timings=dict(data.get("timings", {})),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Report":
        return cls.from_json(json.loads(text))
