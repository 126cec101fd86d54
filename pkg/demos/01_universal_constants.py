"""Universal constants and the L -> 0 limits of the bound.

Run: python demos/01_universal_constants.py
"""
import math

from clt_rates.constants import GAMMA_STAR, KAPPA, T_INF, X0, t_thresholds
from clt_rates.solver import aex_upper

print("The cosine majorant behind every bound is governed by one transcendental root.")
print(f"  x0         = {X0:.10f}   (root of the cubic-sine equation on (pi, 2pi))")
print(f"  kappa      = {KAPPA:.10f}")
print(f"  gamma_star = {GAMMA_STAR:.10f} = 1/sqrt(6 kappa)")
print(f"  t_inf      = {T_INF:.10f}")
print()

print("The switch point t_gamma between the quartic and cubic branches grows with gamma:")
for g in (0.25, 0.41, GAMMA_STAR, 1.0, 2.0, math.inf):
    tg, t1, _ = t_thresholds(g)
    print(f"  gamma = {g:8.4f}   t_gamma = {tg:.4f}   t_1,gamma = {t1:.4f}")
print()

print("As the fraction L -> 0 the bound tends to a closed form; smaller is better.")
for eps, gamma in ((math.inf, math.inf), (math.inf, 1.0), (math.inf, GAMMA_STAR), (4.0, 2.4)):
    print(f"  Esseen   (eps={eps:g}, gamma={gamma:.4g}): {aex_upper('esseen', eps, gamma):.5f}")
best = min((aex_upper("rozovskii", e / 100, GAMMA_STAR), e / 100) for e in range(50, 400))
print(f"  Rozovskii(gamma=gamma_star) is smallest near eps = {best[1]:.2f}: {best[0]:.5f}")
