import math

import numpy as np
import pytest

from wightman.core import ConvergenceError
from wightman.quadrature import QuadratureSpec, integrate


def test_oscillatory_line_integral():
    v = integrate([(0, 1)], [], lambda x: np.exp(-1j * x[0]))
    assert v == pytest.approx(math.sin(1) - 1j * (1 - math.cos(1)), abs=1e-14)


def test_simplex_volume():
    assert integrate([(0, 1), (0, 1)], [(0, 1)], lambda x: np.ones(x.shape[1])) == \
        pytest.approx(0.5, abs=1e-14)


def test_simplex_on_unequal_boxes():
    # x0 in [0, 2], x1 in [0.5, 1]; the part with x0 > x1 has area 0.625
    one = lambda x: np.ones(x.shape[1])
    assert integrate([(0, 2), (0.5, 1)], [(0, 1)], one) == pytest.approx(0.625, abs=1e-13)
    assert integrate([(0, 2), (0.5, 1)], [(1, 0)], one) == pytest.approx(0.375, abs=1e-13)


def test_weighted_triangle():
    f = lambda x: np.exp(-1j * (x[0] - 2 * x[1]))
    fine = integrate([(0, 3), (0, 3)], [(1, 0)], f, QuadratureSpec(base_nodes=64, tol=1e-13))
    # int_0^3 dx1 e^{2i x1} int_0^x1 dx0 e^{-i x0}
    exact = ((np.exp(6j) - 1) / 2j - (np.exp(3j) - 1) / 1j) / 1j
    assert fine == pytest.approx(exact, abs=1e-12)


def test_doubling_converges_quickly():
    f = lambda x: np.cos(3 * x[0]) * np.exp(-1j * x[1])
    r = integrate([(0, 2), (-1, 1)], [], f, info=True)
    assert r.nodes == 64
    assert r.change < 1e-10


def test_contradictory_constraints_vanish():
    assert integrate([(0, 1), (0, 1)], [(0, 1), (1, 0)], lambda x: np.ones(x.shape[1])) == 0


def test_non_convergence_raises():
    f = lambda x: np.exp(-1j * 4000 * x[0])
    with pytest.raises(ConvergenceError):
        integrate([(0, 10)], [], f, QuadratureSpec(base_nodes=4, tol=1e-14, max_doublings=2))


def test_zero_dimensional():
    assert integrate([], [], lambda x: np.full(x.shape[1], 2.5)) == 2.5
