"""Gauss-Legendre tensor quadrature over boxes cut by step-function constraints.

Integrands are vectorised: ``f(x)`` receives an array of shape (d, npts)
and returns npts complex values.  At most two integration variables are
supported, which is all an order-lambda^2 expansion needs.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ConvergenceError


@dataclass(frozen=True)
class QuadratureSpec:
    base_nodes: int = 32
    tol: float = 1e-9
    max_doublings: int = 6

    def to_json(self):
        return {"base_nodes": self.base_nodes, "tol": self.tol,
                "max_doublings": self.max_doublings}


@dataclass
class QuadResult:
    value: complex
    change: float
    nodes: int


@lru_cache(maxsize=None)
def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _cells(intervals, theta):
    """Split the region into cells, each a map from the unit square.

    Returns a list of callables g(s) -> (x, jac) with s of shape (d, npts).
    """
    d = len(intervals)
    if d == 0:
        return [lambda s: (np.zeros((0, s.shape[1])), np.ones(s.shape[1]))]
    if d == 1:
        if theta:
            raise ValueError("a step-function constraint needs two variables")
        (a, b), = intervals
        return [lambda s, a=a, b=b: (a + (b - a) * s, np.full(s.shape[1], b - a))]
    if d != 2:
        raise ValueError("at most two integration variables are supported")
    theta = sorted(set(theta))
    if not theta:
        (a0, b0), (a1, b1) = intervals

        def box(s):
            x = np.vstack([a0 + (b0 - a0) * s[0], a1 + (b1 - a1) * s[1]])
            return x, np.full(s.shape[1], (b0 - a0) * (b1 - a1))
        return [box]
    if len(theta) > 1:
        # i > j and j > i together leave a null set
        return []
    hi, lo = theta[0]
    ah, bh = intervals[hi]
    al, bl = intervals[lo]
    # outer variable is the larger one; inner runs from al to min(bl, outer)
    start = max(ah, al)
    if start >= bh:
        return []
    cuts = [start] + ([bl] if start < bl < bh else []) + [bh]
    cells = []
    for xl, xr in zip(cuts[:-1], cuts[1:]):
        capped = xl >= bl

        def cell(s, xl=xl, xr=xr, capped=capped):
            outer = xl + (xr - xl) * s[0]
            upper = np.full_like(outer, bl) if capped else outer
            inner = al + (upper - al) * s[1]
            x = np.empty((2, s.shape[1]))
            x[hi], x[lo] = outer, inner
            return x, (xr - xl) * (upper - al)
        cells.append(cell)
    return cells


def _rule(d, n):
    x, w = _gauss(n)
    if d == 0:
        return np.zeros((0, 1)), np.ones(1)
    if d == 1:
        return x[None, :], w
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    return np.vstack([X.ravel(), Y.ravel()]), W.ravel()


def _apply(cells, f, d, n):
    s, w = _rule(d, n)
    total = 0j
    l1 = 0.0
    for cell in cells:
        x, jac = cell(s)
        vals = np.asarray(f(x)) * jac * w
        total += vals.sum()
        l1 += np.abs(vals).sum()
    return complex(total), float(l1)


def integrate(intervals, theta, f, quad=None, info=False):
    """Integrate f over the box ``intervals`` restricted by ``theta``.

    ``theta`` is a list of (i, j) pairs meaning x_i > x_j.  Nodes per
    dimension start at quad.base_nodes and double until successive results
    differ by less than quad.tol relative to max(|I|, integral of |f|).
    """
    quad = quad or QuadratureSpec()
    intervals = [(float(a), float(b)) for a, b in intervals]
    d = len(intervals)
    cells = _cells(intervals, list(theta))
    if not cells:
        return QuadResult(0j, 0.0, 0) if info else 0j
    if d == 0:
        val = complex(np.asarray(f(np.zeros((0, 1))))[0])
        return QuadResult(val, 0.0, 1) if info else val
    n = quad.base_nodes
    prev, _ = _apply(cells, f, d, n)
    for _ in range(quad.max_doublings):
        n *= 2
        cur, l1 = _apply(cells, f, d, n)
        change = abs(cur - prev)
        if change <= quad.tol * max(abs(cur), l1):
            return QuadResult(cur, change, n) if info else cur
        prev = cur
    raise ConvergenceError(f"quadrature not converged after {quad.max_doublings} doublings")
