import math

import numpy as np
import pytest

from wightman.core import PhysicalParams, TruncationError
from wightman.fock import (anharmonic_thermal_density, auto_dim, build_density, chi_numeric,
                           ladder_ops, stable_evaluate, truncation_check,
                           wightman_exact_anharmonic, wightman_exact_free, xi_numeric)
from wightman.states import Coherent, Number, Thermal, Vacuum, bose_factor


def test_commutators_on_interior_block():
    p = PhysicalParams(omega=1.7, hbar=0.6)
    a, ad, x, mom = ladder_ops(12, p)
    c = (a @ ad - ad @ a)[:-1, :-1]
    assert np.allclose(c, np.eye(11))
    xp = (x @ mom - mom @ x)[:-1, :-1]
    assert np.allclose(xp, 1j * p.hbar * np.eye(11))
    e1 = np.zeros(12)
    e1[1] = 1
    assert np.allclose(a @ e1, np.eye(12)[0])


def test_densities():
    assert np.allclose(build_density(Vacuum(), 10).rho, np.diag([1] + [0] * 9))
    phi = 0.8
    rho = build_density(Coherent(phi), 40).rho
    k = np.arange(6)
    expect = [phi ** (2 * j) / math.factorial(j) * math.exp(-phi ** 2) for j in k]
    assert np.allclose(np.diag(rho)[:6].real, expect)
    th = build_density(Thermal(0.9), 80).rho.diagonal().real
    assert th[4] / th[3] == pytest.approx(math.exp(-0.9))


def test_truncation_examples():
    ok, deficit, _ = truncation_check(Vacuum(), 5, 1e-12)
    assert ok and deficit == 0
    _, deficit, _ = truncation_check(Coherent(1.0), 40, 1e-12)
    assert deficit < 1e-12
    _, deficit, _ = truncation_check(Thermal(0.5), 60, 1e-10)
    assert deficit < 1e-10
    ok, deficit, _ = truncation_check(Thermal(0.05), 20, 1e-6)
    assert not ok and deficit == pytest.approx(math.exp(-1.0))


def test_truncation_error_raised():
    with pytest.raises(TruncationError):
        build_density(Thermal(0.05), 20)
    with pytest.raises(TruncationError):
        build_density(Number(30), 20)


def test_auto_dim_settles():
    for st in (Coherent(1.5), Thermal(0.5), Number(7)):
        D = auto_dim(st)
        assert truncation_check(st, D, 1e-10)[0] or isinstance(st, Thermal)
        val, used, delta = stable_evaluate(lambda d: xi_numeric(st, 1, 1, d), st)
        assert delta < 1e-12


def test_numeric_moments():
    assert xi_numeric(Vacuum(), 1, 1) == 0
    assert xi_numeric(Coherent(0.5), 2, 1) == pytest.approx(0.125)
    assert xi_numeric(Thermal(math.log(2)), 1, 1) == pytest.approx(1.0, abs=1e-12)


def test_zero_points_is_trace():
    assert wightman_exact_free(Thermal(1.0), []) == pytest.approx(1.0)


def test_vacuum_two_point_exact():
    v = wightman_exact_free(Vacuum(), [0.7, -0.4])
    assert v == pytest.approx(0.5 * np.exp(-1.1j))


def test_interacting_at_switch_on_is_free_moment():
    p = PhysicalParams(lam=0.3, t0=0.5)
    st = Coherent(0.4 - 0.2j)
    a = wightman_exact_anharmonic(st, [0.5, 0.5, 0.5], p)
    b = wightman_exact_free(st, [0.5, 0.5, 0.5])
    assert a == pytest.approx(b, abs=1e-12)


def test_interacting_reduces_to_free_at_zero_coupling():
    p = PhysicalParams(lam=0.0, t0=-0.3)
    st = Thermal(1.1)
    ts = [0.2, 1.4, 0.9]
    assert wightman_exact_anharmonic(st, ts, p) == pytest.approx(
        wightman_exact_free(st, ts), abs=1e-12)


def test_anharmonic_thermal_cumulant_continuity():
    beta = 1.0
    for lam in (1e-3, 1e-4):
        rho = anharmonic_thermal_density(beta, PhysicalParams(lam=lam), 60)
        chi = chi_numeric(rho, 4)
        assert abs(chi[1, 1] - bose_factor(beta)) < 2 * lam
        assert abs(chi[2, 2]) < 2 * lam
