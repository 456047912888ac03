import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from polyescape.decide import Instance, Mode
from polyescape.lp import Polytope


def rationals(max_num=255, max_den=255):
    return st.builds(
        Fraction,
        st.integers(-max_num, max_num),
        st.integers(1, max_den),
    )


def square_matrices(max_dim=4, max_num=255, max_den=255):
    return st.integers(1, max_dim).flatmap(
        lambda d: st.lists(
            st.lists(rationals(max_num, max_den), min_size=d, max_size=d),
            min_size=d,
            max_size=d,
        )
    )


def random_rational(rng: random.Random, bits: int = 8) -> Fraction:
    top = (1 << bits) - 1
    return Fraction(rng.randint(-top, top), rng.randint(1, top))


def random_matrix(rng: random.Random, d: int, bits: int = 8) -> list[list[Fraction]]:
    return [[random_rational(rng, bits) for _ in range(d)] for _ in range(d)]


def random_box(rng: random.Random, d: int, bits: int = 8) -> Polytope:
    lower, upper = [], []
    for _ in range(d):
        a, b = random_rational(rng, bits), random_rational(rng, bits)
        if a == b:
            b = a + 1
        lower.append(min(a, b))
        upper.append(max(a, b))
    return Polytope.box(lower, upper)


def random_simplex(rng: random.Random, d: int, bits: int = 8) -> Polytope:
    """x_i >= l_i, sum (x_i - l_i) <= s, shifted to a random corner."""
    corner = [random_rational(rng, bits) for _ in range(d)]
    size = abs(random_rational(rng, bits)) or Fraction(1)
    rows, rhs = [], []
    for i in range(d):
        row = [0] * d
        row[i] = -1
        rows.append(row)
        rhs.append(-corner[i])
    rows.append([1] * d)
    rhs.append(sum(corner) + size)
    return Polytope(rows, rhs)


def random_instance(rng: random.Random, d: int, mode: Mode, bits: int = 8) -> Instance:
    shape = random_box if rng.random() < 0.5 else random_simplex
    return Instance(random_matrix(rng, d, bits), shape(rng, d, bits), mode)


@pytest.fixture
def rng():
    return random.Random(20261019)


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        outcome, duration = _ACCEPTANCE[name]
        number = name.split("_")[2]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} ({name}, {duration:.1f}s)")
