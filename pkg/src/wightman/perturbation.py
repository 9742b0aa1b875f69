"""Interaction-picture expansion of quartic-oscillator Wightman correlators.

Each external x(t_j) is dressed as U^dag(t_j, t0) x(t_j) U(t_j, t0).  At
order K the K insertions of (lambda/4!) x^4 are distributed over the 2n
slots t_{j+} (from U^dag, anti-time-ordered, factor +i) and t_{j-} (from U,
time-ordered, factor -i).  The free correlator of the resulting operator
sequence is evaluated by normal ordering against the state's xi table.
"""
from dataclasses import dataclass
from itertools import product
import math
import warnings

import numpy as np

from .core import PhysicalParams, TimeLabel
from .quadrature import QuadratureSpec, integrate
from .states import ChiTable, XiTable
from .transforms import chi_to_xi
from .wick import free_correlator_grid

MAX_ORDER = 2


@dataclass(frozen=True)
class InsertionPlan:
    """How many x^4 insertions sit in each slot, listed in chain order."""
    counts: tuple   # ((TimeLabel(j, branch), k), ...)

    @property
    def order(self):
        return sum(k for _, k in self.counts)

    @property
    def sign(self):
        s = 1 + 0j
        for lab, k in self.counts:
            s *= (1j * lab.branch) ** k
        return s

    def copies(self):
        """One internal label per inserted x^4, with copy indices."""
        out = []
        for lab, k in self.counts:
            out += [TimeLabel(lab.j, lab.branch, c) for c in range(k)]
        return out

    def __str__(self):
        parts = [f"{lab}x{k}" if k > 1 else str(lab) for lab, k in self.counts if k]
        return "[" + ", ".join(parts) + "]"


def _slots(n):
    return [TimeLabel(j, b) for j in range(1, n + 1) for b in (1, -1)]


def enumerate_insertions(n, K):
    if n < 1:
        raise ValueError("need at least one external time")
    if not 0 <= K <= MAX_ORDER:
        raise NotImplementedError(f"orders above {MAX_ORDER} are not supported")
    slots = _slots(n)
    plans = []
    for ks in product(range(K + 1), repeat=len(slots)):
        if sum(ks) == K:
            plans.append(InsertionPlan(tuple((s, k) for s, k in zip(slots, ks) if k)))
    return plans


def _sequences(plan, n):
    """Operator orderings of one plan, each with its theta constraints.

    Yields (sequence, theta) where sequence lists ('ext', j) or ('var', i)
    entries and theta holds (i, k) pairs meaning var_i > var_k.  Same-slot
    pairs produce two orderings: later time leftmost in a time-ordered slot,
    earlier time leftmost in an anti-time-ordered one.
    """
    copies = plan.copies()
    by_slot = {}
    for i, lab in enumerate(copies):
        by_slot.setdefault((lab.j, lab.branch), []).append(i)
    orders = [[]]
    for idxs in by_slot.values():
        if len(idxs) == 1:
            continue
        u, v = idxs
        orders = [o + [(u, v)] for o in orders] + [o + [(v, u)] for o in orders]
    for theta in orders:
        left_first = {}
        for hi, lo in theta:
            branch = copies[hi].branch
            left_first[(copies[hi].j, branch)] = [hi, lo] if branch < 0 else [lo, hi]
        seq = []
        for j in range(1, n + 1):
            for branch in (1, 0, -1):
                if branch == 0:
                    seq.append(("ext", j - 1))
                    continue
                idxs = by_slot.get((j, branch), [])
                for i in left_first.get((j, branch), idxs):
                    seq += [("var", i)] * 4
        yield seq, theta


def _grid_times(seq, ext_times, var_grid):
    npts = var_grid.shape[1]
    rows = []
    for kind, i in seq:
        rows.append(np.full(npts, ext_times[i]) if kind == "ext" else var_grid[i])
    return np.vstack(rows) if rows else np.zeros((0, npts))


def _xi_for(state_chi, N):
    if isinstance(state_chi, XiTable):
        xi = state_chi
    elif isinstance(state_chi, ChiTable):
        xi = chi_to_xi(state_chi)
    else:
        raise TypeError("expected a ChiTable or XiTable")
    if xi.max_order < N:
        raise ValueError(f"table of order {xi.max_order} is too short; need {N}")
    return xi


def _prefactor(plan, p):
    fact = 1
    for _, k in plan.counts:
        fact *= math.factorial(k)
    return plan.sign * (p.lam / 24.0) ** plan.order / fact


def _check_times(times, p):
    if any(t < p.t0 for t in times):
        raise ValueError("external times must not precede the switch-on time t0")


def build_integrand(plan, internal_times, times, chi, p=None):
    """Integrand of one plan at a single point of its integration box.

    ``internal_times`` follows plan.copies().  Same-slot pairs carry the
    step functions of the (anti-)time-ordered product and the 1/k! of the
    Dyson series, so that integrating over the full box gives the plan's
    contribution.
    """
    p = p or PhysicalParams()
    times = [float(t) for t in times]
    n = len(times)
    copies = plan.copies()
    internal_times = [float(t) for t in internal_times]
    if len(internal_times) != len(copies):
        raise ValueError("one internal time per insertion is required")
    for lab, t in zip(copies, internal_times):
        if not p.t0 <= t <= times[lab.j - 1]:
            raise ValueError(f"internal time {t} for {lab} outside [t0, t_{lab.j}]")
    xi = _xi_for(chi, n + 4 * plan.order)
    grid = np.array(internal_times, dtype=float).reshape(len(copies), 1)
    total = 0j
    for seq, theta in _sequences(plan, n):
        if all(internal_times[hi] > internal_times[lo] for hi, lo in theta):
            total += free_correlator_grid(_grid_times(seq, times, grid), xi, p)[0]
    return _prefactor(plan, p) * total


def plan_contribution(plan, chi, times, p, quad=None):
    times = [float(t) for t in times]
    n = len(times)
    xi = _xi_for(chi, n + 4 * plan.order)
    intervals = [(p.t0, times[lab.j - 1]) for lab in plan.copies()]
    total = 0j
    for seq, theta in _sequences(plan, n):
        def f(x, seq=seq):
            return free_correlator_grid(_grid_times(seq, times, x), xi, p)
        total += integrate(intervals, theta, f, quad)
    return _prefactor(plan, p) * total


def perturbative_orders(chi, times, p, K, quad=None):
    """Contribution of each order 0..K, as a list."""
    quad = quad or QuadratureSpec()
    _check_times(times, p)
    if not p.perturbative_ok():
        warnings.warn("coupling is not small compared with omega^3/hbar", RuntimeWarning)
    out = []
    for k in range(K + 1):
        out.append(sum((plan_contribution(plan, chi, times, p, quad)
                        for plan in enumerate_insertions(len(times), k)), 0j))
    return out


def correlator_perturbative(chi, times, p, K, quad=None):
    return sum(perturbative_orders(chi, times, p, K, quad))
