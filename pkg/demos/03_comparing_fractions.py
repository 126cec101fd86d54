"""The Esseen and Rozovskii fractions against the classical ones.

Exact rational arithmetic makes the separating examples checkable to the last
digit, and the exact distribution of S_n gives the true Kolmogorov distance.

Run: python demos/03_comparing_fractions.py
"""
from fractions import Fraction

from clt_rates.fractions import (
    esseen_fraction,
    kolmogorov_distance,
    lyapunov_fraction,
    osipov_fraction,
    rozovskii_fraction,
    scenario,
)


def show(name, sys):
    E = esseen_fraction(sys, 1, 1)
    R = rozovskii_fraction(sys, 1, 1)
    print(f"{name} (n = {sys.n})")
    print(f"  Esseen    L_E^3(1,1)   = {E}  ({float(E):.5f})")
    print(f"  Rozovskii L_R^3(1,1)   = {R}  ({float(R):.5f})")
    print(f"  Lyapunov  L_3n         = {float(lyapunov_fraction(sys)):.5f}")
    print(f"  Osipov    Lam_n+L_n(1) = {float(osipov_fraction(sys, 1)):.5f}")
    d = kolmogorov_distance(sys)
    print(f"  exact Delta_n = {d:.5f}; 2.74 * L_E^3 = {2.74 * float(E):.5f}")
    return E, R


show("Three-point law: Rozovskii is strictly smaller", scenario("three_point", n=4))
print()
E, R = show("Symmetric four-point law", scenario("four_point_symmetric", n=9))
osi = osipov_fraction(scenario("four_point_symmetric", n=9), 1)
lhs, rhs = Fraction(273, 100) * max(E, R), Fraction(187, 100) * osi
print(f"  2.73 * max(L_E, L_R) = {float(lhs):.5f} < 1.87 * Osipov = {float(rhs):.5f}: {lhs < rhs}")
print()
show("Two-point law p = 11/20: Rozovskii exceeds Lyapunov here", scenario("two_point_Fp", p=Fraction(11, 20), n=16))
print()

print("Heavy tails: |alpha_3|/sigma^2 grows like 4/(7 theta).")
for theta in (0.1, 0.01, 1e-3, 5e-4):
    m = scenario("pareto_theta", theta=theta)
    print(f"  theta = {theta:<7g} ratio = {m.ratio:10.2f}")
