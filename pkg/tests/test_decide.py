import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_instance
from polyescape.decide import Instance, Mode, Outcome, decide, fixed_point_set, is_fixed_point
from polyescape.lp import Polytope, Shape, vertices


def test_scalar_decay_escapes():
    for b in range(1, 11):
        inst = Instance([[Fraction(1, 2**b)]], Polytope([[1], [-1]], [2, -1]))
        assert decide(inst).outcome is Outcome.ALL_ESCAPE


def test_zero_matrix_is_trapped():
    dec = decide(Instance([[0, 0], [0, 0]], Polytope.box([0, 0], [1, 1])))
    assert dec.outcome is Outcome.TRAPPED_POINT_EXISTS
    assert Polytope.box([0, 0], [1, 1]).contains(dec.witness)


def test_discrete_swap_is_trapped():
    inst = Instance([[0, 1], [1, 0]], Polytope.box([0, 0], [1, 1]), Mode.DISCRETE)
    dec = decide(inst)
    assert dec.outcome is Outcome.TRAPPED_POINT_EXISTS
    assert is_fixed_point(inst, dec.witness)


def test_unbounded_and_empty():
    assert decide(Instance([[1]], Polytope([[-1]], [-1]))).polytope_shape is Shape.UNBOUNDED
    dec = decide(Instance([[1]], Polytope([[1], [-1]], [0, -1])))
    assert dec.outcome is Outcome.INVALID_POLYTOPE and dec.polytope_shape is Shape.EMPTY


def test_rotation_escapes():
    p = Polytope.box([1, Fraction(-1, 2)], [2, Fraction(1, 2)])
    assert decide(Instance([[0, -1], [1, 0]], p)).all_escape


def test_affine_drift_escapes_and_affine_fixed_point_traps():
    p = Polytope.box([0], [1])
    assert decide(Instance([[0]], p, affine=[1])).all_escape
    # x' = -x + 1/2 has the rest point 1/2 in [0, 1]
    dec = decide(Instance([[-1]], p, affine=[Fraction(1, 2)]))
    assert dec.outcome is Outcome.TRAPPED_POINT_EXISTS and dec.witness == (Fraction(1, 2),)


def test_fixed_point_set():
    assert fixed_point_set([[1, 0], [0, 2]], Mode.DISCRETE) == ((1,), (0,))


@given(st.integers(0, 2**32), st.integers(1, 4), st.sampled_from(list(Mode)))
@settings(max_examples=60, deadline=None)
def test_trapped_witness_is_exact(seed, d, mode):
    rng = random.Random(seed)
    inst = random_instance(rng, d, mode, bits=3)
    dec = decide(inst)
    if dec.outcome is Outcome.TRAPPED_POINT_EXISTS:
        assert inst.polytope.contains(dec.witness)
        assert is_fixed_point(inst, dec.witness)
    else:
        assert dec.outcome is Outcome.ALL_ESCAPE
        # no vertex is a fixed point
        assert not any(is_fixed_point(inst, v) for v in vertices(inst.polytope))


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance([[1, 2]], Polytope.box([0], [1]))
    with pytest.raises(ValueError):
        Instance([[1]], Polytope.box([0, 0], [1, 1]))
