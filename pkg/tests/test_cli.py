import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from polyescape.cli import main
from polyescape.instance_file import InstanceFormatError, Report, parse_rational

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def path(name):
    return str(INSTANCES / name)


def test_parse_rational():
    assert parse_rational("1.01") == Fraction(101, 100)
    assert parse_rational("-7/3") == Fraction(-7, 3)
    assert parse_rational("42") == 42
    assert parse_rational("-.5") == Fraction(-1, 2)
    for bad in ("1/0", "abc", 1.5, "1." + "1" * 65):
        with pytest.raises(InstanceFormatError):
            parse_rational(bad)


@pytest.mark.parametrize(
    "name, code",
    [
        ("scalar_decay_b3.json", 0),
        ("zero_matrix.json", 1),
        ("unbounded.json", 2),
        ("rotation.json", 0),
        ("swap_discrete.json", 1),
        ("affine_drift.json", 0),
    ],
)
def test_decide_exit_codes(capsys, name, code):
    assert run(capsys, "decide", "--input", path(name))[0] == code


def test_decide_prints_witness(capsys):
    _, out, _ = run(capsys, "decide", "--input", path("zero_matrix.json"))
    assert "witness: (0, 0)" in out


def test_unbounded_message(capsys):
    _, out, _ = run(capsys, "decide", "--input", path("unbounded.json"))
    assert "compact" in out


def test_malformed_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"A": [[1.5]], "B": [["1"]], "c": ["1"]}')
    assert run(capsys, "decide", "--input", str(bad))[0] == 3
    bad.write_text("not json")
    assert run(capsys, "decide", "--input", str(bad))[0] == 3
    bad.write_text('{"A": [["1", "0"]], "B": [["1"]], "c": ["1"]}')
    assert run(capsys, "decide", "--input", str(bad))[0] == 3


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "--input", path("scalar_decay_b3.json"), "--format", "json")
    assert code == 0
    cert = json.loads(out)["certificate"]
    assert Fraction(cert["total_bound"]["value"]) >= 8 * Fraction(0.6931471805599453)
    code, out, _ = run(capsys, "bound", "--input", path("rotation.json"), "--format", "json")
    assert json.loads(out)["certificate"]["complex_hull_time"]["display"].startswith("3.14159")
    assert run(capsys, "bound", "--input", path("zero_matrix.json"))[0] == 4


def test_bound_text_shows_closed_form(capsys):
    _, out, _ = run(capsys, "bound", "--input", path("jordan_3x3.json"))
    assert "4*exp(640*b*d^(4d+10))" in out and "index 2" in out


def test_simulate(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--input", path("scalar_decay_b3.json"), "--x0", "1")
    assert code == 0 and "5.5451774" in out
    code, out, _ = run(capsys, "simulate", "--input", path("doubling_discrete.json"), "--x0", "1")
    assert "escape iteration 2" in out
    assert run(capsys, "simulate", "--input", path("doubling_discrete.json"), "--x0", "5")[0] == 3
    code, _, _ = run(
        capsys, "simulate", "--input", path("rotation.json"), "--samples", "2", "--trace-dir", str(tmp_path), "--horizon", "10"
    )
    assert code == 0
    files = sorted(tmp_path.glob("*.csv"))
    assert len(files) == 6
    assert files[0].read_text().splitlines()[0] == "t,x1,x2,inside"


def test_validate_and_corrupted_certificate(capsys, tmp_path):
    assert run(capsys, "validate", "--input", path("scalar_decay_b3.json"))[0] == 0
    assert run(capsys, "validate", "--input", path("rotation.json"))[0] == 0
    _, out, _ = run(capsys, "bound", "--input", path("scalar_decay_b3.json"), "--format", "json")
    report = json.loads(out)
    report["certificate"]["total_bound"] = {"kind": "exact", "value": "2"}
    bad = tmp_path / "cert.json"
    bad.write_text(json.dumps(report))
    assert run(capsys, "validate", "--input", path("scalar_decay_b3.json"), "--certificate", str(bad))[0] == 6
    assert run(capsys, "validate", "--input", path("zero_matrix.json"))[0] == 4


def test_report_round_trip_and_determinism(capsys):
    args = ("validate", "--input", path("scalar_decay_b3.json"), "--format", "json", "--samples", "5", "--seed", "3")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert Report.loads(first).dumps() == first
    strip = lambda text: {k: v for k, v in json.loads(text).items() if k != "timings"}
    assert strip(first) == strip(second)
    assert len(json.loads(first)["input_digest"]) == 64


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "polyescape", "decide", "--input", path("zero_matrix.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1 and "trapped" in proc.stdout
