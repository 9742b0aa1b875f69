"""Oscillator states and their normal-ordered moment / cumulant tables."""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from .core import PhysicalParams, complex_from_json, complex_to_json


class _Table:
    """Triangular table of complex coefficients indexed by (m, n), m + n <= N.

    Index m counts creation operators, n annihilation operators.
    """

    kind = "table"

    def __init__(self, max_order, entries=None):
        if max_order < 0:
            raise ValueError("max_order must be non-negative")
        self.max_order = int(max_order)
        self.data = np.zeros((self.max_order + 1, self.max_order + 1), dtype=complex)
        self.data[0, 0] = 1.0
        if entries is not None:
            if isinstance(entries, np.ndarray):
                k = min(entries.shape[0], self.max_order + 1)
                self.data[:k, :k] = entries[:k, :k]
            else:
                for (m, n), v in entries.items():
                    self[m, n] = v
        self._mask()

    def _mask(self):
        N = self.max_order
        m, n = np.indices(self.data.shape)
        self.data[m + n > N] = 0

    def _check(self, m, n):
        if m < 0 or n < 0 or m + n > self.max_order:
            raise IndexError(f"({m},{n}) outside table of order {self.max_order}")

    def __getitem__(self, idx):
        m, n = idx
        self._check(m, n)
        return complex(self.data[m, n])

    def __setitem__(self, idx, value):
        m, n = idx
        self._check(m, n)
        self.data[m, n] = value

    def keys(self):
        N = self.max_order
        return [(m, d - m) for d in range(N + 1) for m in range(d + 1)]

    def items(self):
        return [(k, self[k]) for k in self.keys()]

    def truncated(self, order):
        if order > self.max_order:
            raise ValueError("cannot extend a table beyond its order")
        return type(self)(order, self.data)

    def hermitian_error(self):
        return float(np.max(np.abs(self.data - self.data.T.conj())))

    def allclose(self, other, atol=1e-12, rtol=0.0):
        N = min(self.max_order, other.max_order)
        a = self.data[:N + 1, :N + 1]
        b = other.data[:N + 1, :N + 1]
        return bool(np.all(np.abs(a - b) <= atol + rtol * np.abs(b)))

    def to_json(self):
        return {"max_order": self.max_order,
                "entries": [{"m": m, "n": n, **complex_to_json(v)}
                            for (m, n), v in self.items()]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        t = cls(obj["max_order"])
        for e in obj["entries"]:
            t[e["m"], e["n"]] = complex_from_json(e)
        return t

    def __repr__(self):
        return f"{type(self).__name__}(max_order={self.max_order})"


class XiTable(_Table):
    """xi_mn = <(a^dagger)^m a^n>."""
    kind = "xi"


class ChiTable(_Table):
    """Cumulant coefficients chi_mn, the Taylor coefficients of ln Z_P."""
    kind = "chi"


# states

@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Coherent:
    phi: complex = 0j


@dataclass(frozen=True)
class Thermal:
    beta: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")


@dataclass(frozen=True)
class Number:
    n: int = 0

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError("number state index must be a non-negative integer")


@dataclass(frozen=True)
class Mixture:
    parts: tuple = ()

    def __post_init__(self):
        parts = tuple((float(w), s) for w, s in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise ValueError("empty mixture")
        if any(w < 0 for w, _ in parts):
            raise ValueError("mixture weights must be non-negative")
        if abs(sum(w for w, _ in parts) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")


@dataclass(frozen=True)
class CustomXi:
    table: XiTable = field(compare=False)


@dataclass(frozen=True)
class CustomDensity:
    matrix: np.ndarray = field(compare=False)


StateSpec = (Vacuum, Coherent, Thermal, Number, Mixture, CustomXi, CustomDensity)


def bose_factor(beta, p=None):
    p = p or PhysicalParams()
    if not beta > 0:
        raise ValueError("beta must be positive")
    return 1.0 / math.expm1(beta * p.hbar * p.omega)


def xi_closed(state, m, n, p=None):
    if m < 0 or n < 0:
        raise ValueError("indices must be non-negative")
    if isinstance(state, Vacuum):
        return 1.0 + 0j if m == n == 0 else 0j
    if isinstance(state, Coherent):
        phi = complex(state.phi)
        return phi.conjugate() ** m * phi ** n
    if isinstance(state, Thermal):
        if m != n:
            return 0j
        return complex(math.factorial(n) * bose_factor(state.beta, p) ** n)
    if isinstance(state, Number):
        if m != n or n > state.n:
            return 0j
        return complex(math.perm(state.n, n))
    if isinstance(state, Mixture):
        return sum(w * xi_closed(s, m, n, p) for w, s in state.parts)
    if isinstance(state, CustomXi):
        return state.table[m, n]
    if isinstance(state, CustomDensity):
        raise TypeError("density-matrix states have no closed form; use wightman.fock.xi_numeric")
    raise TypeError(f"unknown state {state!r}")


def xi_table(state, max_order, p=None):
    if isinstance(state, CustomXi) and state.table.max_order < max_order:
        raise ValueError("custom xi table is shorter than the requested order")
    t = XiTable(max_order)
    for m, n in t.keys():
        t[m, n] = xi_closed(state, m, n, p)
    return t


def chi_closed(state, m, n, p=None):
    """Closed-form cumulant coefficient, or None when the state has none."""
    if m == n == 0:
        return 1.0 + 0j
    if isinstance(state, Vacuum):
        return 0j
    if isinstance(state, Coherent):
        if (m, n) == (0, 1):
            return complex(state.phi)
        if (m, n) == (1, 0):
            return complex(state.phi).conjugate()
        return 0j
    if isinstance(state, Thermal):
        return complex(bose_factor(state.beta, p)) if (m, n) == (1, 1) else 0j
    return None


def chi_table(state, max_order, p=None):
    """Cumulant table, from closed forms where available, else via ln Z_P."""
    if chi_closed(state, 0, 1, p) is not None:
        t = ChiTable(max_order)
        for m, n in t.keys():
            t[m, n] = chi_closed(state, m, n, p)
        return t
    if isinstance(state, CustomDensity):
        from .fock import chi_numeric, build_density
        return chi_numeric(build_density(state, None, p), max_order)
    from .transforms import xi_to_chi
    return xi_to_chi(xi_table(state, max_order, p))


def state_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("type")
    if kind == "vacuum":
        return Vacuum()
    if kind == "coherent":
        return Coherent(complex_from_json(obj.get("phi", 0)))
    if kind == "thermal":
        return Thermal(float(obj["beta"]))
    if kind == "number":
        return Number(int(obj["n"]))
    if kind == "mixture":
        return Mixture(tuple((float(p["w"]), state_from_json(p["state"]))
                             for p in obj["parts"]))
    if kind == "custom_xi":
        return CustomXi(XiTable.from_json(obj))
    if kind == "density":
        rows = [[complex_from_json(z) for z in row] for row in obj["matrix"]]
        return CustomDensity(np.array(rows, dtype=complex))
    raise ValueError(f"unknown state type {kind!r}")


def state_to_json(state):
    if isinstance(state, Vacuum):
        return {"type": "vacuum"}
    if isinstance(state, Coherent):
        return {"type": "coherent", "phi": complex_to_json(state.phi)}
    if isinstance(state, Thermal):
        return {"type": "thermal", "beta": state.beta}
    if isinstance(state, Number):
        return {"type": "number", "n": state.n}
    if isinstance(state, Mixture):
        return {"type": "mixture",
                "parts": [{"w": w, "state": state_to_json(s)} for w, s in state.parts]}
    if isinstance(state, CustomXi):
        return {"type": "custom_xi", **state.table.to_json()}
    if isinstance(state, CustomDensity):
        return {"type": "density",
                "matrix": [[complex_to_json(z) for z in row] for row in np.asarray(state.matrix)]}
    raise TypeError(f"state {state!r} has no JSON form")
