import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wightman.core import (ExpSum, PhysicalParams, SignVector, TimeLabel, complex_from_json,
                           complex_to_json, eval_expsum, eval_expsum_grid, internal_labels,
                           make_F, make_f)


def test_single_plus_is_annihilation_phase():
    p = PhysicalParams()
    v = eval_expsum(make_f("+"), [0.7], p)
    assert v == pytest.approx(math.sqrt(0.5) * cmath.exp(-0.7j))


def test_equal_time_pair_gives_length_squared():
    p = PhysicalParams(omega=2.0, hbar=3.0)
    assert eval_expsum(make_f("+-"), [1.1, 1.1], p) == pytest.approx(0.75)


def test_three_minus_signs():
    v = eval_expsum(make_f("---"), [1, 2, 3])
    assert v == pytest.approx(0.5 ** 1.5 * cmath.exp(6j), abs=1e-15)


def test_F31_terms():
    F = make_F(3, 1)
    assert set(F.terms) == {(1, -1, -1), (-1, 1, -1), (-1, -1, 1)}
    assert len(make_F(4, 2)) == 6
    assert make_F(3, 3).terms == {(1, 1, 1): 1.0}


def test_F31_at_zero_with_unit_prefactor():
    p = PhysicalParams(omega=1.0, hbar=2.0)
    assert eval_expsum(make_F(3, 1), [0, 0, 0], p) == pytest.approx(3.0)


def test_empty_expsum_is_zero():
    assert eval_expsum(ExpSum(2), [0.3, 0.1]) == 0


def test_make_F_guards():
    with pytest.raises(ValueError):
        make_F(2, 3)
    with pytest.raises(ValueError):
        make_F(0, 0)


def test_sign_vector_parsing():
    s = SignVector("+-+")
    assert tuple(s) == (1, -1, 1)
    assert str(s) == "+-+"
    assert s.flipped() == SignVector("-+-")
    assert s.plus_count == 2


def test_grid_matches_pointwise():
    e = make_F(3, 1) * (0.3 - 0.2j) + make_f("++-")
    rng = np.random.default_rng(5)
    ts = rng.uniform(-3, 3, (3, 7))
    grid = eval_expsum_grid(e, ts)
    for k in range(7):
        assert grid[k] == pytest.approx(eval_expsum(e, ts[:, k]))


def test_conjugate_reversal_is_hermitian_adjoint():
    # <x(t1)x(t2)>^* = <x(t2)x(t1)>: conjugating flips signs, reversing reorders
    e = make_f("+-") * (1 + 2j) + make_f("++") * 0.5
    ts = [0.4, 1.9]
    a = eval_expsum(e.conj(), ts[::-1])
    b = np.conj(eval_expsum(e.reversed(), ts))
    assert a == pytest.approx(b)


sign_keys = st.lists(st.sampled_from([1, -1]), min_size=3, max_size=3).map(tuple)
coeffs = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
expsums = st.dictionaries(sign_keys, coeffs, max_size=6).map(lambda d: ExpSum(3, d))


@given(expsums, expsums)
def test_addition_is_pointwise(a, b):
    ts = [0.2, -1.0, 2.5]
    assert eval_expsum(a + b, ts) == pytest.approx(
        eval_expsum(a, ts) + eval_expsum(b, ts), abs=1e-9)


@given(expsums)
def test_json_round_trip(e):
    assert ExpSum.from_json(e.to_json()) == e


def test_time_labels():
    t1p, t1m, t1 = TimeLabel(1, 1), TimeLabel(1, -1), TimeLabel(1, 0)
    assert [str(x) for x in (t1p, t1, t1m)] == ["t1+", "t1", "t1-"]
    # chain order t1+ -> t1 -> t1- -> t2+ ...
    assert t1p.position < t1.position < t1m.position < TimeLabel(2, 1).position
    assert [str(x) for x in internal_labels(2)] == ["t1+", "t1-", "t2+", "t2-"]


def test_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(omega=0)
    with pytest.raises(ValueError):
        PhysicalParams(lam=-1)
    assert PhysicalParams(lam=0.05).perturbative_ok()
    assert not PhysicalParams(lam=1.0).perturbative_ok()


def test_complex_json():
    z = 1.5 - 2j
    assert complex_to_json(z) == {"re": 1.5, "im": -2.0}
    assert complex_from_json(complex_to_json(z)) == z
    assert complex_from_json(0.5) == 0.5
