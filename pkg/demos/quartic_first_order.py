# First-order quartic correction to <x(t1) x(t2)> against exact diagonalisation.
import numpy as np

from wightman import Coherent, PhysicalParams, chi_table, perturbative_orders
from wightman.fock import wightman_exact_anharmonic

st = Coherent(0.7)
times = (1.3, 0.4)
chi = chi_table(st, 6)

lams = np.array([1e-4, 3e-4, 1e-3, 3e-3, 1e-2])
res = []
for lam in lams:
    p = PhysicalParams(lam=lam)
    free, first = perturbative_orders(chi, times, p, 1)
    exact = wightman_exact_anharmonic(st, times, p)
    res.append(abs(exact - free - first))
    print(f"lambda={lam:.0e}  first-order={first:.3e}  residual={res[-1]:.3e}")

# residual should shrink like lambda^2
slope = np.polyfit(np.log(lams), np.log(res), 1)[0]
print("log-log slope", round(slope, 3))

# second order buys one more power
p = PhysicalParams(lam=0.02)
orders = perturbative_orders(chi_table(st, 10), times, p, 2)
exact = wightman_exact_anharmonic(st, times, p)
print("K=1 residual", abs(exact - sum(orders[:2])), " K=2 residual", abs(exact - sum(orders)))
