"""The characteristic-function majorants against exact characteristic functions.

Sixty independent zero-mean discrete summands, its Esseen fraction L^3, and a comparison
of |f_n(t)| and |f_n(t) - exp(-t^2/2)| with the two majorants.

Run: python demos/04_majorant_check.py [seed]
"""
import math
import sys
from fractions import Fraction

import numpy as np

from clt_rates.chf import BoundContext, abs_chf_bound, diff_bound
from clt_rates.constants import truncation_geometry
from clt_rates.fractions import DiscreteDistribution, SummandSystem, chf, esseen_fraction

rng = np.random.default_rng(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
blocks = []
for _ in range(3):
    xs = sorted(set(int(v) for v in rng.integers(-6, 7, size=3)) | {-7, 7})
    w = rng.integers(1, 6, size=len(xs))
    ps = [Fraction(int(v), int(w.sum())) for v in w]
    m = sum(p * x for x, p in zip(xs, ps))
    # each law repeated: a sum of 60 independent terms
    blocks.append((DiscreteDistribution(tuple(x - m for x in xs), tuple(ps)), 20))
system = SummandSystem(tuple(blocks))

eps, gamma = 1.0, 1.0
L = float(esseen_fraction(system, eps, gamma)) ** (1 / 3)
ctx = BoundContext("esseen", eps, gamma, L)
print(f"n = {system.n}, L_E(1,1) = {L:.4f}")
print(f"{'t':>6} {'|f_n|':>10} {'bound':>10} {'r_n':>10} {'bound':>10}")
t_max = truncation_geometry(eps, L).tau0_bar / L
for t in np.linspace(0.5, 6, 12):
    f = chf(system, t)
    line = f"{t:6.2f} {abs(f):10.6f} {abs_chf_bound(t, ctx):10.6f}"
    if t < t_max:
        r = abs(f - math.exp(-t * t / 2))
        line += f" {r:10.2e} {diff_bound(t, ctx):10.2e}"
    print(line)
print(f"(the difference majorant applies for t < {t_max:.2f})")
