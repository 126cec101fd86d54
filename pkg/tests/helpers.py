"""Shared generators for the test-suite."""
from fractions import Fraction

import numpy as np

from clt_rates.fractions import DiscreteDistribution, SummandSystem


def random_distribution(rng, max_atoms=4, span=20):
    """Zero-mean distribution with rational atoms and masses."""
    k = int(rng.integers(2, max_atoms + 1))
    while True:
        xs = sorted(set(int(v) for v in rng.integers(-span, span + 1, size=k)))
        if len(xs) >= 2:
            break
    w = [int(v) for v in rng.integers(1, 10, size=len(xs))]
    ps = [Fraction(v, sum(w)) for v in w]
    m = sum(p * x for x, p in zip(xs, ps))
    return DiscreteDistribution(tuple(Fraction(x) - m for x in xs), tuple(ps))


def random_system(rng, max_n=5, max_atoms=4):
    n = int(rng.integers(1, max_n + 1))
    return SummandSystem(tuple((random_distribution(rng, max_atoms), 1) for _ in range(n)))


def systems(seed, count, **kw):
    rng = np.random.default_rng(seed)
    return [random_system(rng, **kw) for _ in range(count)]
