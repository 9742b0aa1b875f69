import math

import numpy as np
import pytest

from wightman.core import PhysicalParams
from wightman.fock import build_density, xi_numeric
from wightman.states import (ChiTable, Coherent, CustomDensity, CustomXi, Mixture, Number,
                             Thermal, Vacuum, XiTable, bose_factor, chi_closed, chi_table,
                             state_from_json, state_to_json, xi_closed, xi_table)

P = PhysicalParams()


def test_bose_factor_values():
    assert bose_factor(math.log(2)) == pytest.approx(1.0, abs=1e-14)
    assert bose_factor(1.0) == pytest.approx(0.5819767, abs=1e-7)
    assert 0 < bose_factor(60.0) < 1e-25


def test_xi_closed_forms():
    phi = 0.5
    assert xi_closed(Coherent(phi), 2, 1) == pytest.approx(0.125)
    z = 0.3 - 0.8j
    assert xi_closed(Coherent(z), 2, 3) == pytest.approx(z.conjugate() ** 2 * z ** 3)
    assert xi_closed(Vacuum(), 1, 1) == 0
    assert xi_closed(Thermal(math.log(2)), 1, 1) == pytest.approx(1.0)
    nb = bose_factor(0.7)
    assert xi_closed(Thermal(0.7), 3, 3) == pytest.approx(6 * nb ** 3)
    assert xi_closed(Thermal(0.7), 2, 1) == 0
    assert xi_closed(Number(3), 2, 2) == 6
    assert xi_closed(Number(3), 4, 4) == 0
    assert xi_closed(Number(3), 1, 2) == 0


@pytest.mark.parametrize("state", [Coherent(0.4 + 0.2j), Thermal(0.9), Number(2),
                                   Mixture(((0.3, Vacuum()), (0.7, Coherent(0.5))))])
def test_xi_closed_matches_fock(state):
    for m, n in [(1, 0), (1, 1), (2, 1), (2, 2), (0, 3)]:
        assert xi_closed(state, m, n) == pytest.approx(xi_numeric(state, m, n), abs=1e-10)


def test_chi_closed_forms():
    assert chi_closed(Vacuum(), 2, 2) == 0
    assert chi_closed(Coherent(0.5), 0, 1) == 0.5
    assert chi_closed(Coherent(0.5j), 1, 0) == -0.5j
    assert chi_closed(Thermal(1.0), 1, 1) == pytest.approx(bose_factor(1.0))
    assert chi_closed(Number(1), 1, 1) is None


def test_mixture_weights_validated():
    with pytest.raises(ValueError):
        Mixture(((0.5, Vacuum()), (0.6, Thermal(1.0))))


def test_table_triangle_and_hermitian():
    t = xi_table(Coherent(0.3 + 0.1j), 4)
    assert t.hermitian_error() < 1e-15
    with pytest.raises(IndexError):
        t[3, 2]
    assert len(t.keys()) == 15


def test_table_json_round_trip():
    t = chi_table(Number(2), 4)
    back = ChiTable.from_json(t.to_json())
    assert back.allclose(t, atol=0)


def test_number_state_chi_has_no_closed_form_but_transforms():
    c = chi_table(Number(1), 4)
    # xi_11 = 1, xi_22 = 0
    assert c[1, 1] == pytest.approx(1.0)
    assert c[2, 2] == pytest.approx(-2.0)
    assert c[0, 1] == 0


@pytest.mark.parametrize("state", [Vacuum(), Coherent(0.5 - 0.25j), Thermal(1.3), Number(4),
                                   Mixture(((0.25, Number(1)), (0.75, Thermal(2.0))))])
def test_state_json_round_trip(state):
    back = state_from_json(state_to_json(state))
    assert back == state


def test_custom_states():
    rho = build_density(Coherent(0.6), 30).rho
    dens = state_from_json(state_to_json(CustomDensity(rho)))
    assert chi_table(dens, 2)[0, 1] == pytest.approx(0.6, abs=1e-10)
    xi = xi_table(Thermal(1.0), 4)
    custom = state_from_json(state_to_json(CustomXi(xi)))
    assert chi_table(custom, 4)[1, 1] == pytest.approx(bose_factor(1.0))
    assert isinstance(custom.table, XiTable)


def test_unknown_state_type():
    with pytest.raises(ValueError):
        state_from_json({"type": "squeezed"})


def test_hbar_omega_enter_thermal_occupation():
    p = PhysicalParams(omega=2.0, hbar=0.5)
    assert bose_factor(1.0, p) == pytest.approx(1 / np.expm1(1.0))
