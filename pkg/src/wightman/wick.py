"""Free-oscillator Wightman correlators.

Two independent routes produce the same exponential sum:

* the cumulant route: sum over set partitions of the operator positions of
  products of cumulants, each block keeping its left-to-right order;
* the moment route: normal-order the product of x(t_j) = sqrt(hbar/2w)
  (a e^{-iwt} + a^dag e^{iwt}) and weight (a^dag)^m a^n by xi_mn.
"""
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ExpSum, PhysicalParams, TimeLabel, make_F, make_f
from .states import ChiTable, XiTable

MAX_PARTITION_N = 10


@dataclass(frozen=True)
class OperatorSlot:
    position: int
    time: TimeLabel = None


def _slot_count(slots):
    if isinstance(slots, int):
        n = slots
    else:
        n = len(slots)
    if n < 1:
        raise ValueError("need at least one operator")
    return n


@lru_cache(maxsize=None)
def _rgs_partitions(n):
    out = []
    a = [0] * n

    def rec(i, top):
        if i == n:
            blocks = [[] for _ in range(top + 1)]
            for idx, b in enumerate(a):
                blocks[b].append(idx)
            out.append(tuple(tuple(b) for b in blocks))
            return
        for b in range(top + 2):
            a[i] = b
            rec(i + 1, max(top, b))

    rec(1, 0)
    return tuple(out)


def set_partitions(n):
    """All set partitions of range(n), blocks sorted, via restricted-growth strings."""
    if not 1 <= n <= MAX_PARTITION_N:
        raise ValueError(f"n must be in 1..{MAX_PARTITION_N}")
    return _rgs_partitions(n)


def chi_part(n, chi):
    """State-dependent part of the n-th cumulant: sum_m chi_{m,n-m} F_{n,n-m}."""
    if n < 1:
        raise ValueError("cumulant order must be >= 1")
    if chi.max_order < n:
        raise ValueError(f"chi table of order {chi.max_order} cannot give C_{n}")
    out = ExpSum(n)
    for m in range(n + 1):
        c = chi[m, n - m]
        if c != 0:
            out = out + c * make_F(n, n - m)
    return out


def cumulant_expsum(n, chi):
    out = chi_part(n, chi)
    if n == 2:
        out = out + make_f("+-")
    return out


def _scatter(blocks, cums, n):
    terms = {(0,) * n: 1.0 + 0j}
    for block in blocks:
        c = cums[len(block)]
        new = defaultdict(complex)
        for key, v in terms.items():
            for bs, bv in c.items():
                k = list(key)
                for pos, s in zip(block, bs):
                    k[pos] = s
                new[tuple(k)] += v * bv
        terms = new
    return terms


def partition_term(blocks, chi, n=None):
    """Product of block cumulants for a single partition."""
    n = n or sum(len(b) for b in blocks)
    cums = {len(b): cumulant_expsum(len(b), chi) for b in blocks}
    return ExpSum(n, _scatter(blocks, cums, n))


def wightman_free(slots, chi):
    n = _slot_count(slots)
    cums = {k: cumulant_expsum(k, chi) for k in range(1, n + 1)}
    live = {k for k, c in cums.items() if len(c)}
    total = defaultdict(complex)
    for blocks in set_partitions(n):
        if any(len(b) not in live for b in blocks):
            continue
        for k, v in _scatter(blocks, cums, n).items():
            total[k] += v
    return ExpSum(n, total)


@lru_cache(maxsize=None)
def _normal_order(n):
    # (m, k, signs) -> integer coefficient of (a^dag)^m a^k
    state = {(0, 0, ()): 1}
    for _ in range(n):
        new = defaultdict(int)
        for (m, k, s), c in state.items():
            new[(m, k + 1, s + (1,))] += c
            new[(m + 1, k, s + (-1,))] += c
            if k:
                new[(m, k - 1, s + (-1,))] += k * c
        state = new
    grouped = defaultdict(dict)
    for (m, k, s), c in state.items():
        grouped[(m, k)][s] = c
    return {mk: ExpSum(n, terms) for mk, terms in grouped.items()}


def normal_ordered_expansion(n):
    """Map (m, k) -> ExpSum multiplying xi_mk in the n-point correlator."""
    if n < 1:
        raise ValueError("need at least one operator")
    return dict(_normal_order(n))


def wightman_free_xi(slots, xi):
    n = _slot_count(slots)
    if xi.max_order < n:
        raise ValueError(f"xi table of order {xi.max_order} cannot give {n}-point functions")
    total = ExpSum(n)
    for (m, k), e in _normal_order(n).items():
        c = xi[m, k]
        if c != 0:
            total = total + c * e
    return total


def free_correlator_grid(times, xi, p=None):
    """Numeric <x(s_1)...x(s_N)> on a batch of time tuples.

    ``times`` has shape (N, npts).  Uses normal ordering with the xi table,
    so it is independent of the cumulant machinery.
    """
    p = p or PhysicalParams()
    times = np.atleast_2d(np.asarray(times, dtype=float))
    N, npts = times.shape
    if xi.max_order < N:
        raise ValueError("xi table too short for this many operators")
    c = np.zeros((N + 1, N + 1, npts), dtype=complex)
    c[0, 0] = 1.0
    kk = np.arange(N + 1)[None, :, None]
    for j in range(N):
        u = np.exp(-1j * p.omega * times[j])
        v = u.conj()
        new = np.zeros_like(c)
        new[:, 1:] += c[:, :-1] * u
        new[1:, :] += c[:-1, :] * v
        new[:, :-1] += (kk * c)[:, 1:] * v
        c = new
    return p.scale ** (N / 2) * np.einsum("mk,mkp->p", xi.data[:N + 1, :N + 1], c)


def chi_part_grid(times, chi, p=None):
    """Numeric value of the chi-part of C_k at a batch of k-tuples of times.

    This is the value of a k-legged cumulant blob: chi_{m,k-m} summed over
    every way of choosing which m legs carry e^{+iwt}.
    """
    p = p or PhysicalParams()
    times = np.atleast_2d(np.asarray(times, dtype=float))
    k, npts = times.shape
    if chi.max_order < k:
        raise ValueError("chi table too short for this blob")
    # poly[m] = elementary symmetric sum with m creation legs
    poly = np.zeros((k + 1, npts), dtype=complex)
    poly[0] = 1.0
    for j in range(k):
        u = np.exp(-1j * p.omega * times[j])
        v = u.conj()
        poly[1:] = poly[1:] * u + poly[:-1] * v
        poly[0] = poly[0] * u
    w = np.array([chi[m, k - m] for m in range(k + 1)])
    return p.scale ** (k / 2) * (w @ poly)


def propagator_grid(src, dst, p=None):
    """Free Wightman propagator (hbar/2w) exp(-iw(t_src - t_dst))."""
    p = p or PhysicalParams()
    return p.scale * np.exp(-1j * p.omega * (np.asarray(src) - np.asarray(dst)))
