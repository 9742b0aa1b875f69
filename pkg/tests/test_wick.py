import cmath

import numpy as np
import pytest

from wightman.core import PhysicalParams, eval_expsum, make_F, make_f
from wightman.fock import wightman_exact_free
from wightman.states import ChiTable, Coherent, Number, Thermal, Vacuum, chi_table, xi_table
from wightman.wick import (chi_part, chi_part_grid, cumulant_expsum, free_correlator_grid,
                           normal_ordered_expansion, partition_term, set_partitions,
                           wightman_free, wightman_free_xi)

P = PhysicalParams()


def test_bell_numbers():
    assert [len(set_partitions(n)) for n in (1, 2, 3, 4, 5)] == [1, 2, 5, 15, 52]
    with pytest.raises(ValueError):
        set_partitions(0)


def test_coherent_cumulants():
    chi = chi_table(Coherent(0.3 + 0.4j), 4)
    assert cumulant_expsum(2, chi) == make_f("+-")
    assert len(cumulant_expsum(3, chi)) == 0
    c1 = cumulant_expsum(1, chi)
    t = 0.8
    expect = np.sqrt(0.5) * ((0.3 + 0.4j) * cmath.exp(-1j * t) + (0.3 - 0.4j) * cmath.exp(1j * t))
    assert eval_expsum(c1, [t]) == pytest.approx(expect)


def test_generic_third_cumulant_structure():
    chi = ChiTable(3, {(0, 3): 1.0, (1, 2): 2.0, (2, 1): 3.0, (3, 0): 4.0})
    expect = make_F(3, 3) * 1.0 + make_F(3, 2) * 2.0 + make_F(3, 1) * 3.0 + make_F(3, 0) * 4.0
    assert chi_part(3, chi) == expect


def test_vacuum_two_point():
    chi = chi_table(Vacuum(), 5)
    assert wightman_free(2, chi) == make_f("+-")
    v = eval_expsum(wightman_free(2, chi), [1.0, 0.0])
    assert v == pytest.approx(0.5 * cmath.exp(-1j), abs=1e-15)
    for n in (1, 3, 5):
        assert len(wightman_free(n, chi)) == 0


def test_normal_ordering_low_orders():
    e2 = normal_ordered_expansion(2)
    assert e2[(0, 2)] == make_f("++")
    assert e2[(2, 0)] == make_f("--")
    assert e2[(1, 1)] == make_f("-+") + make_f("+-")
    assert e2[(0, 0)] == make_f("+-")
    assert normal_ordered_expansion(3)[(0, 1)][(1, 1, -1)] == 2
    assert normal_ordered_expansion(4)[(0, 0)] == make_f("+-+-") + make_f("++--") * 2


def test_thermal_four_point_factorises():
    chi = chi_table(Thermal(0.7), 4)
    ts = [0.3, 1.7, -0.4, 2.2]
    four = eval_expsum(wightman_free(4, chi), ts)
    two = wightman_free(2, chi)
    pairs = (eval_expsum(two, ts[:2]) * eval_expsum(two, ts[2:])
             + eval_expsum(two, [ts[0], ts[2]]) * eval_expsum(two, [ts[1], ts[3]])
             + eval_expsum(two, [ts[0], ts[3]]) * eval_expsum(two, [ts[1], ts[2]]))
    assert four == pytest.approx(pairs, abs=1e-13)


def test_partition_term_sums_to_total():
    chi = chi_table(Number(2), 4)
    total = sum((partition_term(b, chi, 4) for b in set_partitions(4)), make_f("++++") * 0)
    assert total.allclose(wightman_free(4, chi))


@pytest.mark.parametrize("state", [Number(1), Coherent(0.9j), Thermal(1.2)])
def test_three_routes_agree(state):
    xi = xi_table(state, 5)
    chi = chi_table(state, 5)
    ts = [0.2, -1.3, 0.9, 2.4, 0.0]
    for n in range(1, 6):
        a = wightman_free(n, chi)
        b = wightman_free_xi(n, xi)
        assert a.allclose(b, atol=1e-12)
        exact = wightman_exact_free(state, ts[:n])
        assert eval_expsum(a, ts[:n]) == pytest.approx(exact, abs=1e-10)
        grid = free_correlator_grid(np.array(ts[:n])[:, None], xi)
        assert grid[0] == pytest.approx(exact, abs=1e-10)


def test_two_point_symmetry():
    # <x(t1)x(t2)>* = <x(t2)x(t1)>
    chi = chi_table(Thermal(0.5), 2)
    two = wightman_free(2, chi)
    assert np.conj(eval_expsum(two, [0.3, 1.1])) == pytest.approx(eval_expsum(two, [1.1, 0.3]))


def test_blob_grid_matches_symbolic():
    chi = chi_table(Number(3), 4)
    rng = np.random.default_rng(2)
    ts = rng.uniform(-2, 2, (4, 5))
    grid = chi_part_grid(ts, chi)
    for k in range(5):
        assert grid[k] == pytest.approx(eval_expsum(chi_part(4, chi), ts[:, k]))


def test_table_too_short():
    with pytest.raises(ValueError):
        chi_part(3, chi_table(Vacuum(), 2))
