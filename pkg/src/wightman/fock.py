"""Brute-force truncated Fock-space reference.

Everything here works with explicit D x D matrices in the number basis and
is meant as an oracle for the analytic routes, not as a fast path.
"""
from dataclasses import dataclass
from functools import lru_cache
import math
import threading

import numpy as np
from scipy import linalg

from .core import PhysicalParams, TruncationError
from .states import (Coherent, CustomDensity, CustomXi, Mixture, Number,
                     Thermal, Vacuum, XiTable)
from .transforms import xi_to_chi

MAX_DIM = 1280


@dataclass(frozen=True)
class DensityRepr:
    dim: int
    rho: np.ndarray
    trace_deficit: float
    top_occupation: float

    def expect(self, op):
        return complex(np.trace(self.rho @ op))


def ladder_ops(D, p=None):
    """Return (a, a_dag, x, p_op) truncated to D levels."""
    p = p or PhysicalParams()
    if D < 2:
        raise ValueError("need at least two levels")
    a = np.diag(np.sqrt(np.arange(1, D, dtype=float)), 1).astype(complex)
    ad = a.conj().T
    x = math.sqrt(p.scale) * (a + ad)
    mom = -1j * math.sqrt(p.omega * p.hbar / 2) * (a - ad)
    return a, ad, x, mom


def auto_dim(state, p=None):
    """Starting truncation; callers double it until results settle."""
    p = p or PhysicalParams()
    if isinstance(state, Vacuum):
        return 40
    if isinstance(state, Coherent):
        return max(40, 4 * math.ceil(abs(state.phi) ** 2) + 20)
    if isinstance(state, Thermal):
        return max(40, math.ceil(8 / (state.beta * p.hbar * p.omega)) + 20)
    if isinstance(state, Number):
        return max(40, state.n + 20)
    if isinstance(state, Mixture):
        return max(auto_dim(s, p) for _, s in state.parts)
    if isinstance(state, CustomDensity):
        return max(40, np.asarray(state.matrix).shape[0] + 10)
    raise TypeError(f"no density matrix available for {state!r}")


def _raw_density(state, D, p):
    if isinstance(state, Vacuum):
        rho = np.zeros((D, D), complex)
        rho[0, 0] = 1
        return rho
    if isinstance(state, Number):
        if state.n >= D:
            raise TruncationError(f"number state {state.n} does not fit in {D} levels")
        rho = np.zeros((D, D), complex)
        rho[state.n, state.n] = 1
        return rho
    if isinstance(state, Coherent):
        phi = complex(state.phi)
        k = np.arange(D)
        logmag = k * np.log(abs(phi)) if phi != 0 else np.where(k == 0, 0.0, -np.inf)
        c = np.exp(logmag - 0.5 * np.array([math.lgamma(j + 1) for j in k])
                   - abs(phi) ** 2 / 2) * np.exp(1j * k * np.angle(phi))
        return np.outer(c, c.conj())
    if isinstance(state, Thermal):
        x = state.beta * p.hbar * p.omega
        # exact normalisation over the infinite ladder, so the truncated trace shows the tail
        w = np.exp(-x * np.arange(D)) * (-math.expm1(-x))
        return np.diag(w).astype(complex)
    if isinstance(state, Mixture):
        return sum(w * _raw_density(s, D, p) for w, s in state.parts)
    if isinstance(state, CustomDensity):
        m = np.asarray(state.matrix, dtype=complex)
        rho = np.zeros((D, D), complex)
        k = min(D, m.shape[0])
        rho[:k, :k] = m[:k, :k]
        return rho
    if isinstance(state, CustomXi):
        raise TypeError("a bare xi table does not determine a density matrix here")
    raise TypeError(f"unknown state {state!r}")


def build_density(state, D=None, p=None, max_deficit=1e-8):
    p = p or PhysicalParams()
    D = D or auto_dim(state, p)
    rho = _raw_density(state, D, p)
    tr = np.trace(rho).real
    deficit = 1.0 - tr
    if deficit > max_deficit:
        raise TruncationError(f"trace deficit {deficit:.3e} at D={D}")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    return DensityRepr(D, rho, float(deficit), float(rho[-1, -1].real))


def truncation_check(state, D, tolerance, p=None):
    """(passed, deficit, top occupation) for a D-level truncation."""
    p = p or PhysicalParams()
    rho = _raw_density(state, D, p)
    deficit = max(0.0, 1.0 - np.trace(rho).real)
    top = float(rho[-1, -1].real)
    return (deficit < tolerance and top < tolerance), float(deficit), top


def stable_evaluate(fn, state, p=None, D=None, tol=1e-12, scale=1.0):
    """Evaluate fn(D) at D and D+10, doubling D until they agree.

    Returns (value, D, |change|).  Agreement means
    |f(D+10) - f(D)| <= tol * max(|f|, scale).
    """
    p = p or PhysicalParams()
    D = D or auto_dim(state, p)
    while D <= MAX_DIM:
        try:
            v1 = fn(D)
            v2 = fn(D + 10)
        except TruncationError:
            D *= 2
            continue
        delta = float(np.max(np.abs(np.asarray(v2) - np.asarray(v1))))
        if delta <= tol * max(float(np.max(np.abs(v2))), scale):
            return v2, D + 10, delta
        D *= 2
    raise TruncationError(f"no stable truncation up to D={MAX_DIM}")


def _moment(rho, m, n):
    a, ad, _, _ = ladder_ops(rho.dim)
    op = np.linalg.matrix_power(ad, m) @ np.linalg.matrix_power(a, n)
    return rho.expect(op)


def xi_numeric(state, m, n, D=None, p=None):
    p = p or PhysicalParams()
    if D is not None:
        return _moment(build_density(state, D, p), m, n)
    val, _, _ = stable_evaluate(lambda d: _moment(build_density(state, d, p), m, n),
                                state, p)
    return complex(val)


def xi_numeric_table(rho, max_order):
    a, ad, _, _ = ladder_ops(rho.dim)
    t = XiTable(max_order)
    left = np.eye(rho.dim, dtype=complex)
    powers_a = [np.eye(rho.dim, dtype=complex)]
    for _ in range(max_order):
        powers_a.append(powers_a[-1] @ a)
    for m in range(max_order + 1):
        for n in range(max_order + 1 - m):
            if (m, n) != (0, 0):
                t[m, n] = rho.expect(left @ powers_a[n])
        left = left @ ad
    return t


def chi_numeric(rho, max_order):
    return xi_to_chi(xi_numeric_table(rho, max_order))


def zchi_numeric(rho, mu, mu_bar):
    """ln Tr[rho exp(mu a^dag) exp(mu_bar a)]."""
    a, ad, _, _ = ladder_ops(rho.dim)
    val = rho.expect(linalg.expm(mu * ad) @ linalg.expm(mu_bar * a))
    return complex(np.log(val))


def wightman_exact_free(state, times, D=None, p=None):
    """Tr[rho x(t_1) ... x(t_n)] with x(t) = e^{iH0 t} x e^{-iH0 t}."""
    p = p or PhysicalParams()
    times = [float(t) for t in times]

    def at(d):
        rho = build_density(state, d, p)
        _, _, x, _ = ladder_ops(d, p)
        k = np.arange(d)
        prod = rho.rho.copy()
        for t in times:
            prod = prod @ (x * np.exp(1j * p.omega * t * (k[:, None] - k[None, :])))
        return complex(np.trace(prod))

    if D is not None:
        return at(D)
    val, _, _ = stable_evaluate(at, state, p, scale=p.scale ** (len(times) / 2))
    return complex(val)


_eig_lock = threading.Lock()


def anharmonic_hamiltonian(D, p):
    # x^4 is formed before truncating so its top-left block is exact
    _, _, xbig, _ = ladder_ops(D + 4, p)
    x4 = np.linalg.matrix_power(xbig, 4)[:D, :D]
    h = np.diag(p.hbar * p.omega * (np.arange(D) + 0.5)) + p.lam / 24.0 * x4
    return 0.5 * (h + h.conj().T)


@lru_cache(maxsize=32)
def _anharmonic_eigh(D, omega, hbar, lam):
    return np.linalg.eigh(anharmonic_hamiltonian(D, PhysicalParams(omega, hbar, lam)))


def anharmonic_eigensystem(D, p):
    with _eig_lock:
        return _anharmonic_eigh(D, p.omega, p.hbar, p.lam)


def wightman_exact_anharmonic(state, times, p, D=None):
    """Tr[rho x_H(t_1) ... x_H(t_n)] for the quartic oscillator.

    The state is specified at the switch-on time t0 in the interaction
    picture, so x_H(t) = e^{iH0 t0} e^{iH(t-t0)} x e^{-iH(t-t0)} e^{-iH0 t0}.
    """
    times = [float(t) for t in times]

    def at(d):
        rho = build_density(state, d, p)
        E, V = anharmonic_eigensystem(d, p)
        _, _, x, _ = ladder_ops(d, p)
        w = np.exp(-1j * p.omega * (np.arange(d) + 0.5) * p.t0)
        # W = e^{-iH0 t0} is diagonal; rho_eig = V^dag W rho W^dag V
        rw = (w[:, None] * rho.rho) * w.conj()[None, :]
        rho_e = V.conj().T @ rw @ V
        x_e = V.conj().T @ x @ V
        prod = rho_e
        for t in times:
            ph = np.exp(1j * E * (t - p.t0) / p.hbar)
            prod = prod @ (ph[:, None] * x_e * ph.conj()[None, :])
        return complex(np.trace(prod))

    if D is not None:
        return at(D)
    val, _, _ = stable_evaluate(at, state, p, scale=p.scale ** (len(times) / 2))
    return complex(val)


def anharmonic_thermal_density(beta, p, D=None):
    """Gibbs state of the quartic Hamiltonian, truncated to D levels."""
    D = D or max(40, math.ceil(8 / (beta * p.hbar * p.omega)) + 20)
    E, V = anharmonic_eigensystem(D, p)
    w = np.exp(-beta * (E - E[0]))
    rho = (V * w[None, :]) @ V.conj().T
    rho = rho / np.trace(rho).real
    return DensityRepr(D, 0.5 * (rho + rho.conj().T), 0.0, float(rho[-1, -1].real))
