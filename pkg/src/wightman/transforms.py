"""Moment <-> cumulant transform as a truncated bivariate log / exp.

With Z_P = sum xi_mn L^m Lb^n / (m! n!) and Z_chi = ln Z_P, both series are
split into homogeneous pieces of total degree d.  Applying the degree
operator L d/dL + Lb d/dLb to g = ln f gives the recurrences

    g_d = f_d - (1/d) sum_{k=1}^{d-1} k g_k f_{d-k}
    h_d = (1/d) sum_{k=1}^{d} k g_k h_{d-k}          (h = exp g)

where products of homogeneous pieces are truncated 2-d convolutions.
"""
import numpy as np
from scipy.special import factorial

from .states import ChiTable, XiTable


def _weights(N):
    f = factorial(np.arange(N + 1), exact=False)
    return np.outer(f, f)


def _graded(a, N):
    """Split a coefficient array into its homogeneous components."""
    m, n = np.indices(a.shape)
    return [np.where(m + n == d, a, 0) for d in range(N + 1)]


def _mul(a, b, N):
    """Product of two truncated bivariate polynomials."""
    out = np.zeros((N + 1, N + 1), dtype=complex)
    for i, j in zip(*np.nonzero(a)):
        if i + j > N:
            continue
        out[i:, j:] += a[i, j] * b[:N + 1 - i, :N + 1 - j]
    m, n = np.indices(out.shape)
    out[m + n > N] = 0
    return out


def series_log(f, N):
    """ln f for a series with constant term 1; returns the graded pieces' sum."""
    fd = _graded(f, N)
    g = [np.zeros_like(f) for _ in range(N + 1)]
    for d in range(1, N + 1):
        acc = fd[d].copy()
        for k in range(1, d):
            acc -= (k / d) * _mul(g[k], fd[d - k], N)
        g[d] = acc
    return sum(g)


def series_exp(g, N):
    gd = _graded(g, N)
    h = [np.zeros_like(g) for _ in range(N + 1)]
    h[0][0, 0] = 1.0
    for d in range(1, N + 1):
        acc = np.zeros_like(g)
        for k in range(1, d + 1):
            acc += (k / d) * _mul(gd[k], h[d - k], N)
        h[d] = acc
    return sum(h)


def xi_to_chi(xi):
    if abs(xi[0, 0] - 1) > 1e-12:
        raise ValueError("xi_00 must equal 1 (normalised state)")
    N = xi.max_order
    w = _weights(N)
    g = series_log(xi.data / w, N) * w
    g[0, 0] = 1.0
    return ChiTable(N, g)


def chi_to_xi(chi):
    if abs(chi[0, 0] - 1) > 1e-12:
        raise ValueError("chi_00 must equal 1 by convention")
    N = chi.max_order
    w = _weights(N)
    g = chi.data / w
    g = g.copy()
    g[0, 0] = 0.0
    return XiTable(N, series_exp(g, N) * w)


def zp_series(xi, lam, lam_bar):
    """Truncated Z_P(lam, lam_bar) evaluated from a xi table."""
    N = xi.max_order
    w = _weights(N)
    lp = lam ** np.arange(N + 1)
    lbp = lam_bar ** np.arange(N + 1)
    return complex(lp @ (xi.data / w) @ lbp)
