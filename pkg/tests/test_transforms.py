import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wightman.core import PhysicalParams
from wightman.fock import build_density, zchi_numeric
from wightman.states import ChiTable, Coherent, Thermal, XiTable, bose_factor, xi_table
from wightman.transforms import chi_to_xi, series_exp, series_log, xi_to_chi, zp_series
from wightman.verify import (CHI_FROM_XI, XI_FROM_CHI, eval_polynomial, parse_polynomial,
                             random_hermitian_xi)


def test_identity_table():
    chi = xi_to_chi(XiTable(5))
    assert chi[0, 0] == 1
    assert np.count_nonzero(chi.data) == 1


def test_requires_unit_normalisation():
    t = XiTable(2)
    t[0, 0] = 2.0
    with pytest.raises(ValueError):
        xi_to_chi(t)


def test_coherent_log_is_linear():
    chi = xi_to_chi(xi_table(Coherent(0.7 - 0.2j), 6))
    assert chi[0, 1] == pytest.approx(0.7 - 0.2j)
    assert chi[1, 0] == pytest.approx(0.7 + 0.2j)
    rest = [abs(v) for (m, n), v in chi.items() if m + n > 1]
    assert max(rest) < 1e-14


def test_thermal_log_is_single_term():
    chi = xi_to_chi(xi_table(Thermal(0.8), 8))
    assert chi[1, 1] == pytest.approx(bose_factor(0.8))
    rest = [abs(v) for (m, n), v in chi.items() if (m, n) not in ((0, 0), (1, 1))]
    assert max(rest) < 1e-12


def test_series_log_exp_inverse():
    rng = np.random.default_rng(3)
    f = np.zeros((5, 5), complex)
    f[0, 0] = 1
    for m in range(5):
        for n in range(5 - m):
            if m + n:
                f[m, n] = rng.normal() + 1j * rng.normal()
    back = series_exp(series_log(f, 4), 4)
    assert np.allclose(back, f, atol=1e-12)


def test_generating_function_matches_fock():
    # ln Z_P through the xi table equals ln Tr[rho e^{mu a^dag} e^{mubar a}]
    st_ = Coherent(0.4 + 0.3j)
    rho = build_density(st_, 40)
    mu, mub = 0.2 - 0.1j, 0.15 + 0.05j
    val = zchi_numeric(rho, mu, mub)
    assert val == pytest.approx(mu * (0.4 - 0.3j) + mub * (0.4 + 0.3j), abs=1e-12)
    z = zp_series(xi_table(st_, 10), mu, mub)
    assert np.log(z) == pytest.approx(val, abs=1e-10)


def test_written_out_relations_parse():
    terms = parse_polynomial("-6 x10^2 x01 + x22")
    assert terms == [(-6.0, [(1, 0), (1, 0), (0, 1)]), (1.0, [(2, 2)])]
    assert set(CHI_FROM_XI) == set(XI_FROM_CHI)


def test_written_out_relations_on_one_table():
    xi = random_hermitian_xi(np.random.default_rng(11), 4)
    chi = xi_to_chi(xi)
    for mn, text in CHI_FROM_XI.items():
        v, scale = eval_polynomial(parse_polynomial(text), xi)
        assert abs(chi[mn] - v) <= 1e-12 * scale
    for mn, text in XI_FROM_CHI.items():
        v, scale = eval_polynomial(parse_polynomial(text), chi)
        assert abs(xi[mn] - v) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.floats(0.1, 2.0))
def test_round_trip(seed, scale):
    xi = random_hermitian_xi(np.random.default_rng(seed), 6, scale)
    back = chi_to_xi(xi_to_chi(xi))
    assert np.allclose(back.data, xi.data, atol=1e-10 * max(1.0, scale ** 6))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_hermiticity_preserved(seed):
    xi = random_hermitian_xi(np.random.default_rng(seed), 5)
    assert xi_to_chi(xi).hermitian_error() < 1e-10
    chi = ChiTable(5, xi.data)
    assert chi_to_xi(chi).hermitian_error() < 1e-10


def test_params_do_not_enter_transform():
    # the transform is purely combinatorial; xi tables of thermal states depend on hbar*omega
    a = xi_table(Thermal(1.0), 4, PhysicalParams(omega=2.0))
    b = xi_table(Thermal(2.0), 4, PhysicalParams(omega=1.0))
    assert xi_to_chi(a).allclose(xi_to_chi(b))
