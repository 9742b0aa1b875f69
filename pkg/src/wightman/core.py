"""Exponential-sum algebra for free oscillator correlators.

Every free-theory quantity is a finite sum

    sum_k c_k (hbar / 2 omega)^(n/2) exp(-i omega sum_j s_kj t_j)

with sign vectors s_k in {+1, -1}^n.  A ``+`` sign multiplies the
annihilation part of x(t) (which carries exp(-i omega t)), a ``-`` sign the
creation part.
"""
from dataclasses import dataclass
from itertools import combinations
import json

import numpy as np


class TruncationError(RuntimeError):
    """Fock-space truncation did not stabilise."""


class ConvergenceError(RuntimeError):
    """Quadrature refinement did not reach the requested tolerance."""


@dataclass(frozen=True)
class PhysicalParams:
    omega: float = 1.0
    hbar: float = 1.0
    lam: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if self.lam < 0:
            raise ValueError("coupling must be non-negative")

    @property
    def scale(self):
        """hbar / (2 omega), the square of the oscillator length."""
        return self.hbar / (2.0 * self.omega)

    def perturbative_ok(self, factor=0.1):
        return self.lam <= factor * self.omega ** 3 / self.hbar


def _parse_signs(sigma):
    if isinstance(sigma, str):
        out = []
        for ch in sigma:
            if ch == "+":
                out.append(1)
            elif ch == "-":
                out.append(-1)
            else:
                raise ValueError(f"bad sign character {ch!r}")
        return tuple(out)
    out = tuple(int(s) for s in sigma)
    if any(s not in (1, -1) for s in out):
        raise ValueError("signs must be +1 or -1")
    return out


class SignVector(tuple):
    """Immutable tuple of +1/-1 entries."""

    def __new__(cls, signs):
        signs = _parse_signs(signs)
        if len(signs) == 0:
            raise ValueError("sign vector must be nonempty")
        return super().__new__(cls, signs)

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self)

    def flipped(self):
        return SignVector(tuple(-s for s in self))

    @property
    def plus_count(self):
        return sum(1 for s in self if s > 0)


def signs_to_str(signs):
    return "".join("+" if s > 0 else "-" for s in signs)


class ExpSum:
    """Finite sum of exponentials over a fixed number of time arguments.

    ``terms`` maps sign tuples to complex coefficients.  The factor
    (hbar/2omega)^(arity/2) is applied only at evaluation time.
    """

    __slots__ = ("arity", "_terms")

    def __init__(self, arity, terms=None, tol=0.0):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        self.arity = int(arity)
        clean = {}
        for key, c in (terms or {}).items():
            key = _parse_signs(key)
            if len(key) != self.arity:
                raise ValueError("all sign vectors must have length arity")
            c = complex(c)
            if abs(c) > tol:
                clean[key] = clean.get(key, 0) + c
        self._terms = {k: v for k, v in clean.items() if abs(v) > tol}

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __getitem__(self, signs):
        return self._terms.get(_parse_signs(signs), 0j)

    def __add__(self, other):
        if not isinstance(other, ExpSum):
            return NotImplemented
        if other.arity != self.arity:
            raise ValueError("arity mismatch")
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return ExpSum(self.arity, out)

    def __neg__(self):
        return ExpSum(self.arity, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, ExpSum):
            return self.concat(c)
        return ExpSum(self.arity, {k: v * c for k, v in self._terms.items()})

    __rmul__ = __mul__

    def concat(self, other):
        """Product of two sums over disjoint, consecutive time arguments."""
        out = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                out[k1 + k2] = v1 * v2
        return ExpSum(self.arity + other.arity, out)

    def conj(self):
        """Complex conjugate at real times: flip signs, conjugate coefficients."""
        return ExpSum(self.arity, {tuple(-s for s in k): v.conjugate()
                                   for k, v in self._terms.items()})

    def reversed(self):
        return ExpSum(self.arity, {k[::-1]: v for k, v in self._terms.items()})

    def rounded(self, tol=1e-12):
        """Coefficients snapped to a grid of spacing ``tol``; tiny terms dropped."""
        out = {}
        for k, v in self._terms.items():
            re = round(v.real / tol) * tol
            im = round(v.imag / tol) * tol
            if re or im:
                out[k] = complex(re, im)
        return ExpSum(self.arity, out)

    def allclose(self, other, atol=1e-12):
        if self.arity != other.arity:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def __eq__(self, other):
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self.arity == other.arity and self._terms == other._terms

    def __repr__(self):
        body = " + ".join(f"({v:.6g}) f[{signs_to_str(k)}]"
                          for k, v in sorted(self._terms.items()))
        return f"ExpSum({self.arity}: {body or '0'})"

    def exponents(self):
        keys = list(self._terms)
        coeffs = np.array([self._terms[k] for k in keys], dtype=complex)
        signs = np.array(keys, dtype=float).reshape(len(keys), self.arity)
        return signs, coeffs

    def to_json(self):
        return {"arity": self.arity,
                "terms": [{"signs": signs_to_str(k), "re": v.real, "im": v.imag}
                          for k, v in sorted(self._terms.items(), reverse=True)]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = {}
        for t in obj["terms"]:
            key = _parse_signs(t["signs"])
            terms[key] = terms.get(key, 0) + complex(t["re"], t["im"])
        return cls(obj["arity"], terms)


def make_f(sigma):
    sigma = SignVector(sigma)
    return ExpSum(len(sigma), {tuple(sigma): 1.0})


def make_F(n, k):
    """Sum of the C(n, k) unit terms with exactly k plus signs."""
    if n < 1 or k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, n >= 1 (got n={n}, k={k})")
    terms = {}
    for plus in combinations(range(n), k):
        key = [-1] * n
        for j in plus:
            key[j] = 1
        terms[tuple(key)] = 1.0
    return ExpSum(n, terms)


def eval_expsum(e, times, p=None):
    p = p or PhysicalParams()
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) != e.arity:
        raise ValueError(f"expected {e.arity} times, got {times.shape}")
    if len(e) == 0:
        return 0j
    signs, coeffs = e.exponents()
    phase = np.exp(-1j * p.omega * (signs @ times))
    return complex(p.scale ** (e.arity / 2) * np.dot(coeffs, phase))


def eval_expsum_grid(e, times, p=None):
    """Vectorised evaluation; ``times`` has shape (arity, npts)."""
    p = p or PhysicalParams()
    times = np.asarray(times, dtype=float)
    if len(e) == 0:
        return np.zeros(times.shape[1:], dtype=complex)
    signs, coeffs = e.exponents()
    phase = np.exp(-1j * p.omega * np.tensordot(signs, times, axes=(1, 0)))
    return p.scale ** (e.arity / 2) * np.tensordot(coeffs, phase, axes=(0, 0))


@dataclass(frozen=True, order=True)
class TimeLabel:
    """External time t_j (branch 0) or an internal time t_{j+} / t_{j-}.

    Positions along the chain t_{1+} -> t_1 -> t_{1-} -> t_{2+} -> ... are
    3(j-1) + {0, 1, 2} for branches +1, 0, -1.
    """
    j: int
    branch: int = 0
    copy: int = 0

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("time indices start at 1")
        if self.branch not in (-1, 0, 1):
            raise ValueError("branch must be +1, 0 or -1")

    @property
    def internal(self):
        return self.branch != 0

    @property
    def position(self):
        return 3 * (self.j - 1) + (1 - self.branch)

    def __str__(self):
        if self.branch == 0:
            return f"t{self.j}"
        return f"t{self.j}{'+' if self.branch > 0 else '-'}"


def internal_labels(n):
    """The set of internal labels, in chain order."""
    out = []
    for j in range(1, n + 1):
        out += [TimeLabel(j, 1), TimeLabel(j, -1)]
    return out


def complex_to_json(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def complex_from_json(obj):
    if isinstance(obj, dict):
        return complex(obj.get("re", 0.0), obj.get("im", 0.0))
    return complex(obj)
