"""Numerical constants in natural convergence-rate estimates for the central limit theorem.

Submodules:

- ``special``: incomplete gamma functions, Gaussian moment integrals, quadrature
- ``constants``: x₀, ϰ, γ*, a(θ), b(θ), thresholds, truncation geometry, k-functions
- ``chf``: majorants of |f_n(t)| and |f_n(t) - e^{-t²/2}|
- ``solver``: small-L and moderate-L bounds and the absolute constants
- ``fractions``: discrete summand systems, the fractions, exact Kolmogorov distance
- ``tables``: recomputation of the reference tables
- ``cli``: command-line front end
"""
__version__ = "0.1.0"

from .chf import BoundContext, FractionKind
from .constants import GAMMA_STAR, KAPPA, X0, solve_universal_constants
from .solver import absolute_constant, aex_upper, c0, c1, c1_sup

__all__ = [
    "__version__",
    "BoundContext",
    "FractionKind",
    "GAMMA_STAR",
    "KAPPA",
    "X0",
    "solve_universal_constants",
    "absolute_constant",
    "aex_upper",
    "c0",
    "c1",
    "c1_sup",
]
