"""Command-line front end: ``polyescape decide|bound|simulate|validate``.

Exit codes:

    0  all trajectories escape / validation passed / simulation finished
    1  a trapped point exists (witness printed)
    2  the polytope is empty or unbounded
    3  malformed input or invalid --x0
    4  bound preconditions unmet (instance is not all-escape)
    5  certification failure while assembling the bound
    6  validation failure: a sample outlasted a simulable bound
"""

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bounds import BoundError, EscapeCertificate, escape_bound
from .decide import Decision, Instance, Outcome, decide
from .instance_file import InstanceFormatError, Report, load_instance, parse_rational
from .lp import DimensionTooLarge, Shape
from .simulate import (
    DEFAULT_SIM_CAP,
    PrecisionExhausted,
    SamplingPlan,
    ValidationStatus,
    escape_time,
    sample_points,
    validate_certificate,
    write_trace,
)
from .spectrum import CertificationFailure

EXIT_ESCAPE, EXIT_TRAPPED, EXIT_INVALID_POLYTOPE, EXIT_INPUT = 0, 1, 2, 3
EXIT_PRECONDITION, EXIT_CERTIFICATION, EXIT_VALIDATION = 4, 5, 6


def _decision_json(dec: Decision) -> dict:
    return {
        "outcome": dec.outcome.value,
        "polytope_shape": dec.polytope_shape.value,
        "witness": None if dec.witness is None else [str(v) for v in dec.witness],
    }


def _decision_text(dec: Decision) -> list[str]:
    if dec.outcome is Outcome.ALL_ESCAPE:
        return ["decision: every trajectory escapes the polytope (no fixed point inside)"]
    if dec.outcome is Outcome.TRAPPED_POINT_EXISTS:
        return ["decision: trapped point exists", "witness: (" + ", ".join(str(v) for v in dec.witness) + ")"]
    lines = [f"decision: invalid polytope ({dec.polytope_shape.value}); a compact nonempty polytope is required"]
    if dec.polytope_shape is Shape.EMPTY:
        lines.append("note: over an empty polytope 'every trajectory escapes' holds vacuously")
    return lines


def _certificate_text(cert: dict) -> list[str]:
    lines = [
        f"total bound: {cert['total_bound']['display']}",
        f"  complex hull time T_c: {cert['complex_hull_time']['display']}",
        f"  real-subspace bound T_r: {cert['real_bound']['display']}",
        f"  ratio C/eps ({cert['ratio_source']}): {cert['ratio_bound']['display']}",
        f"  bit size b = {cert['bit_size']}, dimension d = {cert['dimension']}",
    ]
    for term in cert["per_eigenvalue"]:
        lines.append(f"  eigenvalue {term['eigenvalue']} [{term['case']}, index {term['index']}]: {term['t_lambda']['display']}")
    closed = cert["closed_form"]
    lines.append(f"closed form {closed['formula']}: {closed['display']}")
    lines.append(f"dominated by closed form: {cert['dominated_by_closed_form']}")
    if cert["special_case"]:
        est = cert["special_case_estimate"]["display"]
        lines.append(f"special case {' and '.join(cert['special_case'])}: 4^(b d^2) = {est}")
    lines += [f"note: {n}" for n in cert["notes"]]
    return lines


def _emit(report: Report, text_lines: list[str], fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(report.dumps())
    else:
        print("\n".join(text_lines))


def _parse_x0(text: str, d: int) -> tuple[Fraction, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != d:
        raise InstanceFormatError(f"--x0 needs {d} comma-separated rationals")
    return tuple(parse_rational(p) for p in parts)


def _plan(args) -> SamplingPlan:
    return SamplingPlan(True, args.samples, args.seed)


def _certificate(inst: Instance, args, report: Report, lines: list[str]) -> EscapeCertificate:
    t0 = time.perf_counter()
    cert = escape_bound(inst, args.precision)
    report.timings["bound_seconds"] = round(time.perf_counter() - t0, 6)
    report.certificate = cert.to_json()
    lines += _certificate_text(report.certificate)
    return cert


def cmd_decide(inst: Instance, args, report: Report) -> int:
    t0 = time.perf_counter()
    dec = decide(inst)
    report.timings["decide_seconds"] = round(time.perf_counter() - t0, 6)
    report.decision = _decision_json(dec)
    _emit(report, _decision_text(dec), args.format)
    return {Outcome.ALL_ESCAPE: EXIT_ESCAPE, Outcome.TRAPPED_POINT_EXISTS: EXIT_TRAPPED}.get(dec.outcome, EXIT_INVALID_POLYTOPE)


def cmd_bound(inst: Instance, args, report: Report) -> int:
    dec = decide(inst)
    report.decision = _decision_json(dec)
    lines = _decision_text(dec)
    if dec.outcome is not Outcome.ALL_ESCAPE:
        lines.append("bound: not computed, the instance is not all-escape")
        _emit(report, lines, args.format)
        return EXIT_PRECONDITION
    try:
        _certificate(inst, args, report, lines)
    except (BoundError, CertificationFailure) as exc:
        report.notes.append(f"certification failure: {exc}")
        lines.append(f"certification failure: {exc}")
        _emit(report, lines, args.format)
        return EXIT_CERTIFICATION
    _emit(report, lines, args.format)
    return EXIT_ESCAPE


def cmd_simulate(inst: Instance, args, report: Report) -> int:
    if args.x0 is not None:
        x0 = _parse_x0(args.x0, inst.dimension)
        if not inst.polytope.contains(x0):
            raise InstanceFormatError("--x0 is not inside the polytope")
        starts = [x0]
    else:
        starts = sample_points(inst.polytope, _plan(args))
    horizon = Fraction(args.horizon)
    t0 = time.perf_counter()
    record = args.trace_dir is not None
    runs = [escape_time(inst, x, horizon, args.precision, record) for x in starts]
    report.timings["simulate_seconds"] = round(time.perf_counter() - t0, 6)
    report.runs = [r.to_json() for r in runs]
    unit = "iteration" if inst.mode.value == "discrete" else "time"
    lines = []
    for r in runs:
        point = "(" + ", ".join(str(v) for v in r.initial_point) + ")"
        if r.escaped:
            lines.append(f"x0 = {point}: escape {unit} {float(r.escape_time):.10g}")
        else:
            lines.append(f"x0 = {point}: no escape within {r.horizon}")
    if record:
        out = Path(args.trace_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, r in enumerate(runs):
            write_trace(r, out / f"run_{i:04d}.csv")
        lines.append(f"traces written to {out}")
    _emit(report, lines, args.format)
    return EXIT_ESCAPE


def _load_certificate(path) -> EscapeCertificate:
    data = json.loads(Path(path).read_text())
    if "certificate" in data and "total_bound" not in data:
        data = data["certificate"]
    return EscapeCertificate.from_json(data)


def cmd_validate(inst: Instance, args, report: Report) -> int:
    dec = decide(inst)
    report.decision = _decision_json(dec)
    lines = _decision_text(dec)
    if dec.outcome is not Outcome.ALL_ESCAPE:
        lines.append("validation refused: the instance is not all-escape")
        _emit(report, lines, args.format)
        return EXIT_PRECONDITION
    try:
        if args.certificate:
            cert = _load_certificate(args.certificate)
            report.certificate = cert.to_json()
            report.notes.append(f"certificate loaded from {args.certificate}")
        else:
            cert = _certificate(inst, args, report, lines)
    except (BoundError, CertificationFailure) as exc:
        lines.append(f"certification failure: {exc}")
        _emit(report, lines, args.format)
        return EXIT_CERTIFICATION
    t0 = time.perf_counter()
    val = validate_certificate(inst, cert, _plan(args), Fraction(args.sim_cap), args.precision)
    report.timings["validate_seconds"] = round(time.perf_counter() - t0, 6)
    report.validation = val.to_json()
    lines.append(f"validation {val.status.value}: {val.message}")
    _emit(report, lines, args.format)
    if val.status is ValidationStatus.FAIL:
        return EXIT_VALIDATION
    if val.status is ValidationStatus.REFUSED:
        return EXIT_PRECONDITION
    return EXIT_ESCAPE


COMMANDS = {"decide": cmd_decide, "bound": cmd_bound, "simulate": cmd_simulate, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyescape",
        description="Decide and bound escape of linear dynamics from a compact polytope.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("\n\n", 1)[1],
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--input", required=True, help="instance JSON file")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--precision", type=int, default=128, help="working precision in bits")
    parser.add_argument("--samples", type=int, default=50, help="random interior samples")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--horizon", type=parse_rational, default=Fraction(DEFAULT_SIM_CAP))
    parser.add_argument("--sim-cap", type=parse_rational, default=Fraction(DEFAULT_SIM_CAP))
    parser.add_argument("--trace-dir", default=None, help="write one CSV trace per run")
    parser.add_argument("--x0", default=None, help="initial point, e.g. 1,2/3")
    parser.add_argument("--certificate", default=None, help="validate this certificate instead of computing one")
    parser.add_argument("--ratio-source", choices=("formula",), default="formula")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inst, digest = load_instance(args.input)
    except (OSError, InstanceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = Report(args.command, __version__, digest)
    if inst.affine is not None:
        report.notes.append("affine term homogenized into dimension d+1")
    try:
        return COMMANDS[args.command](inst, args, report)
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DimensionTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION


if __name__ == "__main__":
    sys.exit(main())
