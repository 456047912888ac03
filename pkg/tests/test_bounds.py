import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_instance
from polyescape import directed
from polyescape.bounds import (
    EscapeCertificate,
    PreconditionError,
    closed_form_log,
    complex_hull_time,
    continuous_escape_bound,
    discrete_escape_bound,
    escape_bound,
    log_inequality_threshold,
    ratio_bound_formula,
    real_escape_bound,
    t_lambda_negative,
    t_lambda_positive,
    t_lambda_zero,
)
from polyescape.decide import Instance, Mode, decide
from polyescape.logscale import LogScale
from polyescape.lp import Polytope
from polyescape.spectrum import spectrum

E = LogScale.exact(directed.e_upper())
UNIT = Polytope([[1], [-1]], [2, -1])


def close(x, y, tol=Fraction(1, 10**12)):
    return abs(Fraction(x) - Fraction(y)) <= tol


def test_ratio_formula():
    assert ratio_bound_formula(1, 1).log == 640
    assert ratio_bound_formula(2, 2).log == 20_971_520
    assert ratio_bound_formula(11, 3).log > directed.log_upper(10_000)


def test_t_lambda_zero_values():
    assert t_lambda_zero(1, LogScale.exact(10)).value == 10
    assert t_lambda_zero(2, LogScale.exact(10)).value == 800
    assert t_lambda_zero(3, LogScale.exact(10)).value == 21_870_000


def test_t_lambda_zero_log_form_agrees():
    exact = t_lambda_zero(3, LogScale.exact(10))
    logged = t_lambda_zero(3, LogScale.from_log(directed.log_upper(10)))
    assert close(logged.log, directed.log_upper(21_870_000), Fraction(1, 10**9))


def test_t_lambda_negative_values():
    assert close(t_lambda_negative(1, 1, E).value, 4 * directed.log2_upper() + 2, Fraction(1, 10**15))
    assert close(t_lambda_negative(1, 1, LogScale.exact(1)).value, 4 * directed.log2_upper(), Fraction(1, 10**15))
    one = t_lambda_negative(1, 1, LogScale.exact(5)).value
    two = t_lambda_negative(1, 1, LogScale.exact(10)).value
    assert close(two - one, 2 * directed.log2_upper(), Fraction(1, 10**15))


def test_t_lambda_positive_values():
    assert close(t_lambda_positive(1, Fraction(1, 8), LogScale.exact(2)).value, 8 * directed.log2_upper())
    assert 1 <= t_lambda_positive(1, 1, E).value <= 1 + Fraction(1, 10**9)
    assert close(t_lambda_positive(2, 1, E).value, 2 * directed.log_upper(2 * directed.e_upper()), Fraction(1, 10**15))


def test_threshold_examples():
    assert close(log_inequality_threshold(1, 1), 4 * directed.log2_upper() + 2, Fraction(1, 10**15))
    t = log_inequality_threshold(2, 1)
    assert abs(float(t) - 13.09) < 0.01
    assert t >= 2 * directed.log_upper(t) + 1


@given(st.fractions(1, 1000), st.fractions(Fraction(1, 1000), 1000))
def test_threshold_satisfies_inequality(a, b):
    t = log_inequality_threshold(a, b)
    assert t >= a * directed.log_upper(t) + b


def test_complex_hull_time():
    assert directed.pi_upper() == complex_hull_time(spectrum([[0, -1], [1, 0]])).value
    assert complex_hull_time(spectrum([[0, -2], [2, 0]])).value == directed.pi_upper() / 2
    assert complex_hull_time(spectrum([[1, 1, 0], [0, 1, 0], [0, 0, Fraction(101, 100)]])).is_zero


def test_real_escape_bound_examples():
    t_r, _ = real_escape_bound(spectrum([[1]]), E)
    assert close(t_r.value, 2, Fraction(1, 10**9))
    t_r, _ = real_escape_bound(spectrum([[0]]), LogScale.exact(10))
    assert t_r.value == 20
    t_r, terms = real_escape_bound(spectrum([[1, 0], [0, 0]]), LogScale.exact(10))
    assert t_r == LogScale.exact(2 * max(t.t_lambda.value for t in terms))


def test_scalar_decay_certificate():
    for b in range(1, 11):
        inst = Instance([[Fraction(1, 2**b)]], UNIT)
        cert = continuous_escape_bound(inst)
        assert cert.total_bound.value >= 2**b * directed.log2_upper()
        assert cert.dominated_by_closed_form
        assert set(cert.special_case) == {"diagonalizable", "invertible"}


def test_negative_scalar():
    cert = continuous_escape_bound(Instance([[-1]], UNIT))
    assert cert.per_eigenvalue[0].case == "negative"
    assert cert.total_bound.value >= directed.log2_upper()


def test_rotation_certificate():
    p = Polytope.box([1, Fraction(-1, 2)], [2, Fraction(1, 2)])
    cert = continuous_escape_bound(Instance([[0, -1], [1, 0]], p))
    assert cert.complex_hull_time.value == directed.pi_upper()
    assert cert.total_bound == cert.complex_hull_time
    assert any("no real eigenvalues" in n for n in cert.notes)


def test_assembly_identity_and_invariants():
    rng = random.Random(7)
    seen = 0
    while seen < 15:
        inst = random_instance(rng, rng.randint(1, 3), Mode.CONTINUOUS, bits=3)
        if not decide(inst).all_escape:
            continue
        seen += 1
        cert = continuous_escape_bound(inst)
        assert cert.total_bound == cert.complex_hull_time + cert.real_bound
        assert cert.complex_hull_time.certainly_le(cert.total_bound)
        assert cert.real_bound.certainly_le(cert.total_bound)
        real_terms = [t for t in cert.per_eigenvalue if t.case != "complex"]
        if real_terms:
            top = real_terms[0].t_lambda
            for t in real_terms[1:]:
                top = top if t.t_lambda.certainly_le(top) else t.t_lambda
            assert top.scale(2).certainly_le(cert.real_bound)


def test_monotone_in_b_and_d():
    eig = spectrum([[Fraction(1, 2)]])
    prev = None
    for b in range(1, 6):
        t_r, _ = real_escape_bound(eig, ratio_bound_formula(b, 2))
        assert prev is None or prev.certainly_le(t_r)
        prev = t_r
    assert real_escape_bound(eig, ratio_bound_formula(2, 2))[0].certainly_le(
        real_escape_bound(eig, ratio_bound_formula(2, 3))[0]
    )


def test_zero_eigenvalue_dominates():
    ratio = ratio_bound_formula(2, 3)
    zero = t_lambda_zero(2, ratio)
    for other in (t_lambda_positive(2, Fraction(1, 100), ratio), t_lambda_negative(2, Fraction(1, 100), ratio)):
        assert other.certainly_le(zero)


def test_closed_form():
    assert close(closed_form_log(1, 1), 640 + directed.log_upper(4))


def test_discrete_doubling():
    inst = Instance([[2]], Polytope.box([1], [3]), Mode.DISCRETE)
    cert = discrete_escape_bound(inst)
    assert cert.total_bound.is_exact and cert.total_bound.value.denominator == 1
    assert cert.total_bound.value >= 2


def test_discrete_half_uses_negative_case():
    cert = discrete_escape_bound(Instance([[Fraction(1, 2)]], UNIT, Mode.DISCRETE))
    (term,) = cert.per_eigenvalue
    assert term.case == "negative" and cert.total_bound.value >= 1


def test_discrete_negative_and_nilpotent_cost_d():
    cert = discrete_escape_bound(Instance([[-1]], UNIT, Mode.DISCRETE))
    assert cert.total_bound.value == 1
    p = Polytope.box([1, 1], [2, 2])
    assert discrete_escape_bound(Instance([[0, 1], [0, 0]], p, Mode.DISCRETE)).total_bound.value == 2


def test_preconditions():
    with pytest.raises(PreconditionError):
        continuous_escape_bound(Instance([[0]], Polytope.box([0], [1])))
    with pytest.raises(PreconditionError):
        continuous_escape_bound(Instance([[2]], UNIT, Mode.DISCRETE))
    with pytest.raises(PreconditionError):
        discrete_escape_bound(Instance([[0, 1], [1, 0]], Polytope.box([0, 0], [1, 1]), Mode.DISCRETE))


def test_certificate_json_round_trip():
    for inst in (Instance([[Fraction(1, 8)]], UNIT), Instance([[0]], Polytope.box([0], [1]), affine=[1])):
        cert = escape_bound(inst)
        assert EscapeCertificate.from_json(cert.to_json()) == cert
