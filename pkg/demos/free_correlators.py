# Free oscillator correlators in a few states, computed three ways.
import numpy as np

from wightman import Coherent, Number, PhysicalParams, Thermal, chi_table, xi_table
from wightman import eval_expsum, wightman_free, wightman_free_xi
from wightman.fock import wightman_exact_free

p = PhysicalParams(omega=1.0, hbar=1.0)
times = [0.3, 1.1, -0.4, 2.0]

# cumulant tables: coherent and thermal states only have low-order entries
for st in (Coherent(0.6 + 0.2j), Thermal(1.0), Number(2)):
    chi = chi_table(st, 4, p)
    big = {mn: v for mn, v in chi.items() if abs(v) > 1e-12 and mn != (0, 0)}
    print(type(st).__name__, {k: complex(np.round(v, 4)) for k, v in big.items()})

# symbolic correlator as a sum of exponentials
st = Number(2)
chi = chi_table(st, 4, p)
four = wightman_free(4, chi)
print(len(four), "exponential terms in the 4-point function of |2>")

# same thing by normal ordering against <a^dag^m a^n>, and by brute force
same = wightman_free_xi(4, xi_table(st, 4, p))
print("symbolic routes agree:", four.allclose(same))
v = eval_expsum(four, times, p)
ref = wightman_exact_free(st, times, p=p)
print("value", v, "  Fock matrices", ref, "  diff", abs(v - ref))

# thermal 4-point function factorises into pairs
th = chi_table(Thermal(0.7), 4, p)
two = wightman_free(2, th)
g = lambda a, b: eval_expsum(two, [times[a], times[b]], p)
pairs = g(0, 1) * g(2, 3) + g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2)
print("thermal pairing defect", abs(eval_expsum(wightman_free(4, th), times, p) - pairs))
