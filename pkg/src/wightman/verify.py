"""Verification suites shared by the command line and the test-suite.

Each check returns a CheckResult; nothing here raises on a failed
comparison, so a report can always be printed.
"""
from dataclasses import dataclass, field
import time

import numpy as np
from scipy.integrate import quad as scipy_quad

from . import diagrams as dg
from .core import PhysicalParams, TimeLabel, eval_expsum, eval_expsum_grid
from .fock import (build_density, chi_numeric, stable_evaluate,
                   wightman_exact_anharmonic, wightman_exact_free, xi_numeric)
from .perturbation import perturbative_orders
from .quadrature import QuadratureSpec, integrate
from .states import (Coherent, Mixture, Number, Thermal, Vacuum, XiTable,
                     bose_factor, chi_table, xi_table)
from .transforms import chi_to_xi, xi_to_chi
from .wick import (chi_part_grid, partition_term, set_partitions,
                   wightman_free, wightman_free_xi)

EXT, VTX = dg.EXT, dg.VTX


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        bits = ", ".join(f"{k}={_fmt(v)}" for k, v in self.detail.items())
        return f"[{status}] {self.name} ({self.seconds:.1f}s) {bits}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _timed(name, fn):
    t = time.perf_counter()
    passed, detail = fn()
    return CheckResult(name, bool(passed), detail, time.perf_counter() - t)


def random_hermitian_xi(rng, order, scale=1.0):
    t = XiTable(order)
    for m, n in t.keys():
        if (m, n) == (0, 0) or m > n:
            continue
        if m == n:
            t[m, n] = scale * rng.normal()
        else:
            z = scale * complex(rng.normal(), rng.normal())
            t[m, n] = z
            t[n, m] = z.conjugate()
    return t


# closed-form cumulants against the Fock-space route

CLOSED_FORM_STATES = [
    Vacuum(),
    Coherent(0.3 + 0.4j), Coherent(1.5), Coherent(-1.5 / np.sqrt(2) + 1.5j / np.sqrt(2)),
    Thermal(0.5), Thermal(1.0), Thermal(2.5),
]


def closed_form_cumulants(tol=1e-10, order=6):
    p = PhysicalParams()

    def run():
        worst = 0.0
        for st in CLOSED_FORM_STATES:
            exact = chi_table(st, order, p).data
            num, _, _ = stable_evaluate(
                lambda d: chi_numeric(build_density(st, d, p), order).data, st, p)
            err = np.abs(num - exact) / np.maximum(1.0, np.abs(exact))
            worst = max(worst, float(err.max()))
        return worst <= tol, {"max_err": worst, "states": len(CLOSED_FORM_STATES)}
    return _timed("closed-form cumulants vs numeric moments", run)


# moment-cumulant identities written out to fourth order

CHI_FROM_XI = {
    (0, 0): "x00",
    (0, 1): "x01",
    (0, 2): "-x01^2 + x02",
    (1, 1): "x11 - x01 x10",
    (0, 3): "2 x01^3 - 3 x02 x01 + x03",
    (1, 2): "2 x10 x01^2 - 2 x11 x01 - x02 x10 + x12",
    (0, 4): "-6 x01^4 + 12 x02 x01^2 - 4 x03 x01 - 3 x02^2 + x04",
    (1, 3): "-6 x10 x01^3 + 6 x11 x01^2 + 6 x02 x10 x01 - 3 x12 x01 - x03 x10"
            " - 3 x02 x11 + x13",
    (2, 2): "-6 x10^2 x01^2 + 2 x20 x01^2 + 8 x10 x11 x01 - 2 x21 x01 + 2 x02 x10^2"
            " - 2 x11^2 - 2 x10 x12 - x02 x20 + x22",
}

XI_FROM_CHI = {
    (0, 0): "x00",
    (0, 1): "x01",
    (0, 2): "x02 + x01^2",
    (1, 1): "x11 + x01 x10",
    (0, 3): "x01^3 + 3 x02 x01 + x03",
    (1, 2): "x10 x01^2 + 2 x11 x01 + x02 x10 + x12",
    (0, 4): "x01^4 + 6 x02 x01^2 + 4 x03 x01 + 3 x02^2 + x04",
    (1, 3): "x10 x01^3 + 3 x11 x01^2 + 3 x02 x10 x01 + 3 x12 x01 + x03 x10"
            " + 3 x02 x11 + x13",
    (2, 2): "x10^2 x01^2 + x20 x01^2 + 4 x10 x11 x01 + 2 x21 x01 + x02 x10^2"
            " + 2 x11^2 + 2 x10 x12 + x02 x20 + x22",
}


def parse_polynomial(text):
    """'-6 x10^2 x01 + x22' -> [(-6, [(1,0),(1,0),(0,1)]), (1, [(2,2)])]."""
    terms = []
    for chunk in text.replace("- ", "+ -").split("+"):
        toks = chunk.split()
        if not toks:
            continue
        coef, factors = 1.0, []
        for tok in toks:
            if tok == "-":
                coef = -coef
                continue
            sign = -1.0 if tok.startswith("-") else 1.0
            tok = tok.lstrip("-")
            coef *= sign
            if tok[0] == "x":
                base, _, power = tok.partition("^")
                factors += [(int(base[1]), int(base[2]))] * int(power or 1)
            else:
                coef *= float(tok)
        terms.append((coef, factors))
    return terms


def eval_polynomial(terms, table):
    """Value and magnitude scale sum |c| prod |x| of a parsed polynomial."""
    value, scale = 0j, 0.0
    for coef, factors in terms:
        t = coef
        for mn in factors:
            t = t * table[mn]
        value += t
        scale += abs(t)
    return value, scale


def moment_cumulant_identities(seed=0, trials=100, tol=1e-12):
    forward = {k: parse_polynomial(v) for k, v in CHI_FROM_XI.items()}
    backward = {k: parse_polynomial(v) for k, v in XI_FROM_CHI.items()}

    def run():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(trials):
            xi = random_hermitian_xi(rng, 4)
            chi = xi_to_chi(xi)
            for target, source, formulas in ((chi, xi, forward), (xi, chi, backward)):
                for mn, terms in formulas.items():
                    v, scale = eval_polynomial(terms, source)
                    worst = max(worst, abs(target[mn] - v) / scale)
        return worst <= tol, {"max_rel_err": worst, "tables": trials,
                              "relations": len(forward) + len(backward)}
    return _timed("moment-cumulant identities", run)


# free correlators three ways

def random_state(rng):
    kind = rng.integers(5)
    if kind == 0:
        return Vacuum()
    if kind == 1:
        r, a = 1.5 * np.sqrt(rng.uniform()), rng.uniform(0, 2 * np.pi)
        return Coherent(complex(r * np.cos(a), r * np.sin(a)))
    if kind == 2:
        return Thermal(rng.uniform(0.5, 3.0))
    if kind == 3:
        return Number(int(rng.integers(0, 4)))
    w = rng.uniform(0.2, 0.8)
    return Mixture(((w, Coherent(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)))),
                    (1 - w, Thermal(rng.uniform(0.5, 3.0)))))


def _same_expsum(a, b, tol=1e-12):
    keys = {k for k, v in a.items() if abs(v) > tol} | {k for k, v in b.items() if abs(v) > tol}
    return max((abs(a[k] - b[k]) for k in keys), default=0.0)


def free_triple_equivalence(seed=1, cases=12, max_n=6, sym_tol=1e-12, num_tol=1e-8):
    p = PhysicalParams()

    def run():
        rng = np.random.default_rng(seed)
        worst_sym, worst_num = 0.0, 0.0
        for _ in range(cases):
            st = random_state(rng)
            xi = xi_table(st, max_n, p)
            chi = xi_to_chi(xi)
            for n in range(1, max_n + 1):
                by_chi = wightman_free(n, chi)
                by_xi = wightman_free_xi(n, xi)
                worst_sym = max(worst_sym, _same_expsum(by_chi, by_xi, sym_tol))
                ts = rng.uniform(-5, 5, n)
                exact = wightman_exact_free(st, ts, p=p)
                scale = max(abs(exact), p.scale ** (n / 2))
                worst_num = max(worst_num, abs(eval_expsum(by_chi, ts, p) - exact) / scale)
        ok = worst_sym <= sym_tol and worst_num <= num_tol
        return ok, {"max_sym_diff": worst_sym, "max_rel_err": worst_num, "states": cases}
    return _timed("free correlator: partitions = normal ordering = Fock", run)


# traditional Wick factorisation and its coherent-state defect

def _pair_sum(n, chi):
    total = None
    for blocks in set_partitions(n):
        if all(len(b) == 2 for b in blocks):
            t = partition_term(blocks, chi, n)
            total = t if total is None else total + t
    return total


def _with_singletons(n, chi):
    total = None
    for blocks in set_partitions(n):
        if any(len(b) == 1 for b in blocks):
            t = partition_term(blocks, chi, n)
            total = t if total is None else total + t
    return total


def wick_factorization(tol=1e-10, seed=2):
    p = PhysicalParams()

    def run():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for n in (4, 6):
            ts = rng.uniform(-3, 3, (n, 8))
            for st in (Vacuum(), Thermal(0.7), Thermal(2.0)):
                chi = chi_table(st, n)
                diff = wightman_free(n, chi) - _pair_sum(n, chi)
                worst = max(worst, float(np.abs(eval_expsum_grid(diff, ts, p)).max()))
            for phi in (0.8, 0.4 - 1.1j):
                chi = chi_table(Coherent(phi), n)
                full = wightman_free(n, chi)
                defect = full - _pair_sum(n, chi) - _with_singletons(n, chi)
                worst = max(worst, float(np.abs(eval_expsum_grid(defect, ts, p)).max()))
        return worst <= tol, {"max_abs_err": worst}
    return _timed("Wick factorisation (vacuum/thermal) and coherent defect", run)


# order-lambda residual against the anharmonic oracle

SLOPE_LAMBDAS = (1e-4, 3e-4, 1e-3, 3e-3, 1e-2)


def order_scaling(phi=0.7, times=(1.3, 0.4), lams=SLOPE_LAMBDAS, quad=None):
    def run():
        st = Coherent(phi)
        chi = chi_table(st, len(times) + 4)
        res = []
        for lam in lams:
            p = PhysicalParams(lam=lam)  # omega = hbar = 1, so lam is in units of w^3/hbar
            orders = perturbative_orders(chi, times, p, 1, quad)
            res.append(abs(wightman_exact_anharmonic(st, times, p) - sum(orders)))
        slope = float(np.polyfit(np.log(lams), np.log(res), 1)[0])
        return abs(slope - 2.0) <= 0.1, {"slope": slope, "residual_min": min(res),
                                          "residual_max": max(res)}
    return _timed("order-lambda residual scales as lambda^2", run)


# diagrams against the direct expansion

EQUIV_CASES = ((2, 1, (1.3, 0.4)), (4, 1, (1.1, 0.3, 0.9, 0.5)), (2, 2, (1.2, 0.5)))
EQUIV_STATES = (Vacuum(), Coherent(0.6 + 0.3j), Thermal(0.8))


def diagram_sum_equivalence(tol=1e-8, lam=0.05, t0=-0.2, quad=None):
    def run():
        worst = 0.0
        p = PhysicalParams(lam=lam, t0=t0)
        for n, K, ts in EQUIV_CASES:
            for st in EQUIV_STATES:
                chi = chi_table(st, n + 4 * K)
                a = perturbative_orders(chi, ts, p, K, quad)
                b = dg.diagrammatic_orders(chi, ts, p, K, quad)
                rel = abs(sum(a) - sum(b)) / abs(sum(a))
                # the order-K piece on its own, which is not diluted by order 0
                if abs(a[K]) > 0:
                    rel = max(rel, abs(a[K] - b[K]) / abs(a[K]))
                else:
                    rel = max(rel, abs(b[K]))
                worst = max(worst, rel)
        return worst <= tol, {"max_rel_err": worst,
                              "cases": len(EQUIV_CASES) * len(EQUIV_STATES)}
    return _timed("diagram sum = direct expansion", run)


# reference diagrams with quoted labels and symmetry factors

def _e(i):
    return (EXT, i)


def _v(k):
    return (VTX, k)


def reference_diagrams():
    """Named diagrams with their expected labels (or None) and symmetry factors."""
    t1, t2, u, v = _e(0), _e(1), _v(0), _v(1)
    D = dg.Diagram
    L = TimeLabel
    out = {
        "exchange through one vertex": (
            D(2, 1, ((t1, u), (u, t2), (u, u)), ()),
            [(L(1, -1),), (L(2, 1),)], 2),
        "blob self-attachment": (
            D(2, 1, ((t1, u), (u, t2)), ((u, u),)), None, 2),
        "double bubble": (
            D(2, 1, ((t1, t2), (u, u), (u, u)), ()), None, 8),
        "loop and blob-loop bubble": (
            D(2, 1, ((t1, t2), (u, u)), ((u, u),)), None, 4),
        "two-loop chain": (
            D(2, 2, ((t1, u), (u, u), (u, v), (v, v), (v, t2)), ()),
            [(L(1, -1), L(1, -1, 1)), (L(1, -1), L(2, 1)), (L(2, 1), L(2, 1, 1))], 4),
        "sunset": (
            D(2, 2, ((t1, u), (u, v), (u, v), (u, v), (v, t2)), ()),
            [(L(1, -1), L(1, -1, 1)), (L(1, -1), L(2, 1)), (L(2, 1), L(2, 1, 1))], 6),
        "triple line ending on a blob": (
            D(2, 2, ((u, t1), (v, u), (v, u), (v, u)), ((v,), (t2,))),
            [(L(1, 1), L(1, 1, 1))], 6),
        "tadpole with blob legs": (
            D(2, 1, ((u, t2),), ((t1, u), (u, u))),
            [(L(1, 1),), (L(1, -1),), (L(2, 1),)], 2),
    }
    return out


def reference_combinatorics():
    def run():
        bad = []
        sym = []
        for name, (d, labels, S) in reference_diagrams().items():
            d.validate()
            got_S = dg.symmetry_factor(d)
            sym.append(got_S)
            if got_S != S:
                bad.append(f"{name}: S={got_S}")
            if labels is not None and dg.label_assignments(d) != labels:
                bad.append(f"{name}: labels")
        return not bad, {"symmetry_factors": sym, "mismatches": bad or "none"}
    return _timed("labels and symmetry factors of reference diagrams", run)


# cancellation in the single-vertex tadpole with blob legs

def worked_example(beta=0.8, lam=0.05, t0=0.0, times=(1.3, 0.4), tol=1e-10, quad=None):
    def run():
        p = PhysicalParams(lam=lam, t0=t0)
        chi = chi_table(Thermal(beta), 6, p)
        d = reference_diagrams()["tadpole with blob legs"][0]
        rows = dict(dg.evaluate_diagram(d, chi, times, p, quad, detail=True).by_assignment)
        plus, minus, late = (rows[(TimeLabel(1, 1),)], rows[(TimeLabel(1, -1),)],
                             rows[(TimeLabel(2, 1),)])
        cancel = abs(plus + minus)
        nb = bose_factor(beta, p)
        t1, t2 = times

        def blob2(a, b):   # chi-part of the two-point cumulant for a thermal state
            return p.hbar / p.omega * nb * np.cos(p.omega * (a - b))

        def integrand(t):
            return blob2(t1, t) * blob2(t, t) * p.scale * np.exp(-1j * p.omega * (t - t2))
        re = scipy_quad(lambda t: integrand(t).real, t0, t2, epsabs=1e-14, epsrel=1e-13)[0]
        im = scipy_quad(lambda t: integrand(t).imag, t0, t2, epsabs=1e-14, epsrel=1e-13)[0]
        boxed = 0.5j * lam * complex(re, im)
        total = plus + minus + late
        rel = abs(total - boxed) / abs(boxed)
        q = quad or QuadratureSpec()
        return cancel < tol and rel <= q.tol, {"cancellation": cancel, "rel_vs_boxed": rel}
    return _timed("worked example: t1+ and t1- cancel", run)


# convergence bookkeeping

def numerical_hygiene(quad=None):
    quad = quad or QuadratureSpec()

    def run():
        worst_q = 0.0
        p = PhysicalParams(lam=0.05)
        chi = chi_table(Thermal(0.8), 8, p)
        probes = [
            ([(0.0, 1.3)], [], lambda x: chi_part_grid(np.vstack([x[0], x[0]]), chi, p)),
            ([(0.0, 1.3), (0.0, 1.3)], [(0, 1)],
             lambda x: np.exp(-1j * (3 * x[0] - 2 * x[1])) * np.cos(x[0] * x[1])),
            ([(0.0, 1.3), (0.0, 0.4)], [],
             lambda x: chi_part_grid(np.vstack([x[0], x[1], x[1], x[0]]), chi, p)),
            ([(0.0, 2.0), (0.0, 1.0)], [(1, 0)], lambda x: np.exp(1j * x[0] * x[1])),
        ]
        for intervals, theta, f in probes:
            r = integrate(intervals, theta, f, quad, info=True)
            # one more doubling beyond the accepted rule
            again = integrate(intervals, theta, f,
                              QuadratureSpec(r.nodes * 2, quad.tol, quad.max_doublings), info=True)
            worst_q = max(worst_q, abs(again.value - r.value) / max(abs(r.value), 1e-300))
        worst_d = 0.0
        oracle_calls = [
            (Coherent(0.7), lambda d: wightman_exact_anharmonic(
                Coherent(0.7), (1.3, 0.4), p, D=d)),
            (Thermal(0.5), lambda d: wightman_exact_free(Thermal(0.5), (0.3, -1.0, 2.0, 0.1), D=d)),
            (Coherent(1.5), lambda d: xi_numeric(Coherent(1.5), 3, 3, D=d)),
        ]
        for st, fn in oracle_calls:
            v, D, delta = stable_evaluate(fn, st, p)
            worst_d = max(worst_d, delta / max(abs(v), 1.0))
        ok = worst_q <= quad.tol and worst_d <= 1e-12
        return ok, {"quad_max_rel_change": worst_q, "oracle_max_change": worst_d}
    return _timed("quadrature and truncation stability", run)


SUITES = {
    "transforms": [closed_form_cumulants, moment_cumulant_identities],
    "free": [free_triple_equivalence, wick_factorization],
    "perturbation": [order_scaling, worked_example, numerical_hygiene],
    "diagrams": [diagram_sum_equivalence, reference_combinatorics],
}


def run_suite(name, seed=None):
    if name == "all":
        checks = [c for s in ("transforms", "free", "perturbation", "diagrams") for c in SUITES[s]]
    elif name in SUITES:
        checks = SUITES[name]
    else:
        raise KeyError(name)
    out = []
    for c in checks:
        if seed is not None and "seed" in c.__code__.co_varnames[:c.__code__.co_argcount]:
            out.append(c(seed=seed))
        else:
            out.append(c())
    return out
