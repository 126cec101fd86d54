"""Universal constants and the elementary functions that parameterize the bounds.

Infinite truncation/balancing parameters are passed as ``math.inf``; every
formula that has a limit there is special-cased rather than evaluated through
``1/inf`` arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "UniversalConstants",
    "CosCoefficients",
    "TruncationGeometry",
    "solve_universal_constants",
    "X0",
    "KAPPA",
    "GAMMA_STAR",
    "T_INF",
    "TAU1_BAR",
    "cos_coefficients",
    "cos_coef_arrays",
    "t_thresholds",
    "alpha_eps",
    "truncation_geometry",
    "k_theta",
    "k_capped",
    "k_tau",
    "THETA_GRID_SIZE",
]

TWO_PI = 2.0 * math.pi
TAU1_BAR = math.pi / 4.0


def _root_equation(x: float) -> float:
    c, s = math.cos(x), math.sin(x)
    return 8.0 * (c - 1.0) + 8.0 * x * s - 4.0 * x * x * c - x ** 3 * s


@dataclass(frozen=True)
class UniversalConstants:
    x0: float
    kappa: float
    gamma_star: float

    @property
    def t_inf(self) -> float:
        return 2.0 / self.gamma_star


@lru_cache(maxsize=1)
def solve_universal_constants() -> UniversalConstants:
    lo, hi = math.pi, TWO_PI
    if not (_root_equation(lo) > 0.0 > _root_equation(hi)):
        raise ArithmeticError("root of the defining equation is not bracketed")
    x0 = brentq(_root_equation, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    c, s = math.cos(x0), math.sin(x0)
    kappa = math.hypot(c - 1.0 + 0.5 * x0 * x0, s - x0) / (x0 * x0)
    return UniversalConstants(x0=x0, kappa=kappa, gamma_star=1.0 / math.sqrt(6.0 * kappa))


_UC = solve_universal_constants()
X0 = _UC.x0
KAPPA = _UC.kappa
GAMMA_STAR = _UC.gamma_star
T_INF = _UC.t_inf


# ---------------------------------------------------------------------------
# a(θ), b(θ)
# ---------------------------------------------------------------------------

_SERIES_CUTOFF = 1.0
_N_SERIES = 14
_fact = [math.factorial(2 * m + 1) for m in range(_N_SERIES + 1)]
# coefficients of θ^{2m}
_A_SERIES = np.array([(-1) ** m * (1 - m) / (2.0 * (m + 1) * _fact[m]) for m in range(_N_SERIES)])
_B_SERIES = np.array([(-1) ** (m + 2) * (m + 1) / (2.0 * (m + 2) * _fact[m + 1]) for m in range(_N_SERIES)])


@dataclass(frozen=True)
class CosCoefficients:
    theta: float
    a: float
    b: float


def cos_coef_arrays(theta) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized a(θ), b(θ) on [0, 2π]."""
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0.0) or np.any(th > TWO_PI) or np.any(np.isnan(th)):
        raise ValueError("theta must lie in [0, 2π]")
    a = np.empty_like(th)
    b = np.empty_like(th)
    small = th < _SERIES_CUTOFF
    if np.any(small):
        z = th[small] ** 2
        # Horner in θ²
        a[small] = np.polynomial.polynomial.polyval(z, _A_SERIES)
        b[small] = np.polynomial.polynomial.polyval(z, _B_SERIES)
    big = ~small
    if np.any(big):
        t = th[big]
        one_minus_cos = 2.0 * np.sin(0.5 * t) ** 2
        s = np.sin(t)
        t2 = t * t
        a[big] = 2.0 * one_minus_cos / t2 - s / (2.0 * t)
        b[big] = one_minus_cos / (t2 * t2) - s / (2.0 * t2 * t)
        at_end = t == TWO_PI
        a[big] = np.where(at_end, 0.0, a[big])
        b[big] = np.where(at_end, 0.0, b[big])
    return a, b


def cos_coefficients(theta: float) -> CosCoefficients:
    """a(θ) = 2(1-cos θ)/θ² - sin θ/(2θ), b(θ) = (1-cos θ)/θ⁴ - sin θ/(2θ³)."""
    a, b = cos_coef_arrays(float(theta))
    return CosCoefficients(float(theta), float(a), float(b))


# ---------------------------------------------------------------------------
# thresholds in t and the truncation geometry
# ---------------------------------------------------------------------------

def t_thresholds(gamma: float) -> tuple[float, float, float]:
    """(t_γ, t_{1,γ}, t_{2,γ}) with t_γ ≤ t_{1,γ} ≤ 2/γ*."""
    gamma = float(gamma)
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    gs = GAMMA_STAR
    if math.isinf(gamma):
        t_g = 2.0 / gs
        t2 = 2.0 / gs
        return t_g, t2, t2
    inv = 1.0 / gamma
    t_g = 2.0 / (gs * gs * (math.sqrt(1.0 / (gs * gs) + inv * inv) + inv))
    t2 = 2.0 * max(inv, 1.0 / gs)
    ratio = gamma / gs
    t1 = t2 * (1.0 - math.sqrt(max(1.0 - ratio * ratio, 0.0)))
    return t_g, t1, t2


_ALPHA_INF = 3.0 * 2.0 ** (-2.0 / 3.0)


def alpha_eps(eps: float) -> float:
    """inf over 0 < x < min(ε, 1) of (x - x³)^{-2/3}."""
    eps = float(eps)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if eps <= 3.0 ** -0.5:
        return (eps - eps ** 3) ** (-2.0 / 3.0)
    return _ALPHA_INF


@dataclass(frozen=True)
class TruncationGeometry:
    alpha: float
    tau0_bar: float
    L0_bar: float
    alpha1: float

    def __iter__(self):
        return iter((self.alpha, self.tau0_bar, self.L0_bar, self.alpha1))


def truncation_geometry(eps: float, L: float) -> TruncationGeometry:
    """α(ε), τ̄₀(ε) = √(2/α), L̄₀(ε) = ε τ̄₀, and α₁(ε, L)."""
    L = float(L)
    if not L > 0:
        raise ValueError(f"L must be positive, got {L!r}")
    alpha = alpha_eps(eps)
    tau0_bar = math.sqrt(2.0 / alpha)
    if math.isinf(eps):
        return TruncationGeometry(alpha, tau0_bar, math.inf, math.sqrt(alpha / 2.0))
    L0_bar = eps * tau0_bar
    if L <= L0_bar:
        alpha1 = math.sqrt(alpha / 2.0)
    else:
        alpha1 = eps / (2.0 * L) + alpha * L / (4.0 * eps)
    return TruncationGeometry(alpha, tau0_bar, L0_bar, alpha1)


# ---------------------------------------------------------------------------
# k-functions
# ---------------------------------------------------------------------------

def k_theta(tau: float, u: float, theta: float) -> float:
    """k(τ, u, θ) = a(θ) - 4 τ/u (a(θ) + b(θ) u²)."""
    if not 0.0 < theta <= TWO_PI:
        raise ValueError("theta must lie in (0, 2π]")
    if tau < 0 or u < 0:
        raise ValueError("tau and u must be nonnegative")
    c = cos_coefficients(theta)
    if u == 0.0:
        return c.a if tau == 0.0 else -math.inf
    return c.a - 4.0 * tau / u * (c.a + c.b * u * u)


THETA_GRID_SIZE = 2049
_GRID = np.linspace(0.0, TWO_PI, THETA_GRID_SIZE)
_GA, _GB = cos_coef_arrays(_GRID)
with np.errstate(divide="ignore", invalid="ignore"):
    _GR = np.sqrt(_GA / _GB)
_GR[-1] = TWO_PI  # limit of √(a/b) at 2π
_GS = np.sqrt(_GA * _GB)
_LOCAL_POINTS = 65
_LOCAL_STAGES = 4


def _k_rows(tau: np.ndarray, u: np.ndarray, a, b, r):
    v = np.minimum(u, r)
    return a - 4.0 * tau / v * (a + b * v * v)


def _k_at(tau, u, theta):
    a, b = cos_coef_arrays(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(theta < TWO_PI, np.sqrt(a / b), TWO_PI)
    return _k_rows(tau, u, a, b, r)


def _local_grid_max(tau, u, lo, hi):
    """Nested-grid maximization of θ ↦ k(τ, u∧√(a/b), θ) on [lo, hi], row-wise.

    Each stage samples the current bracket and keeps the two cells adjacent
    to the best sample, which contains the maximizer of a unimodal profile.
    """
    frac = np.linspace(0.0, 1.0, _LOCAL_POINTS)
    best = np.full(tau.shape, -np.inf)
    for _ in range(_LOCAL_STAGES):
        width = hi - lo
        th = lo[:, None] + width[:, None] * frac[None, :]
        vals = _k_at(tau[:, None], u[:, None], th)
        j = np.argmax(vals, axis=1)
        rows = np.arange(tau.size)
        best = np.maximum(best, vals[rows, j])
        step = width / (_LOCAL_POINTS - 1)
        center = th[rows, j]
        lo = np.maximum(center - step, 0.0)
        hi = np.minimum(center + step, TWO_PI)
    return best


def _sup_theta(tau: np.ndarray, u: np.ndarray) -> np.ndarray:
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    tau, u = np.broadcast_arrays(tau, u)
    tau = tau.ravel()
    u = u.ravel()
    out = np.empty(tau.shape)
    zero = tau == 0.0
    out[zero] = 0.5
    idx_nz = np.flatnonzero(~zero)
    # process in blocks to bound the temporary (n, grid) arrays
    block = max(1, 2_000_000 // THETA_GRID_SIZE)
    for s in range(0, idx_nz.size, block):
        sel = idx_nz[s:s + block]
        t = tau[sel][:, None]
        uu = u[sel][:, None]
        vals = _k_rows(t, uu, _GA[None, :], _GB[None, :], _GR[None, :])
        j = np.argmax(vals, axis=1)
        best = vals[np.arange(sel.size), j]
        lo = _GRID[np.maximum(j - 1, 0)]
        hi = _GRID[np.minimum(j + 1, THETA_GRID_SIZE - 1)]
        refined = _local_grid_max(tau[sel], u[sel], lo, hi)
        out[sel] = np.maximum(best, refined)
    return out


def k_capped(tau, u):
    """sup over θ of k(τ, min(u, √(a(θ)/b(θ))), θ).  Scalar or array input."""
    tau_a = np.asarray(tau, dtype=float)
    u_a = np.asarray(u, dtype=float)
    if np.any(tau_a < 0):
        raise ValueError("tau must be nonnegative")
    if np.any(u_a <= 0):
        raise ValueError("u must be positive")
    shape = np.broadcast(tau_a, u_a).shape
    out = _sup_theta(tau_a, u_a).reshape(shape)
    return float(out) if out.ndim == 0 else out


def k_tau(tau):
    """sup over θ of a(θ) - 8τ√(a(θ)b(θ)); positive iff τ < π/4."""
    tau_a = np.asarray(tau, dtype=float)
    if np.any(tau_a < 0):
        raise ValueError("tau must be nonnegative")
    out = _sup_theta(tau_a, np.full(tau_a.shape, np.inf)).reshape(tau_a.shape)
    return float(out) if out.ndim == 0 else out
