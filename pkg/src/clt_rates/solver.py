"""Two-regime evaluation of the absolute constants.

Small L uses a closed-form incomplete-gamma majorant optimized over
(τ₀, τ₁); moderate L uses the smoothing inequality with numerically
integrated majorants, optimized over (T₀, T₁), and a certified sweep in L.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import optimize

from .chf import (
    BoundContext,
    FractionKind,
    abs_chf_bound,
    cubic_coefficient,
    diff_bound,
    envelope_A,
    envelope_B,
    h_factor,
)
from .constants import GAMMA_STAR, KAPPA, TAU1_BAR, k_capped, k_tau, t_thresholds, truncation_geometry
from .special import (
    DEFAULT_QUADRATURE,
    QuadratureSettings,
    gamma_lower,
    gamma_upper,
    gaussian_power_tail,
    integrate,
    log_tail_integral,
)

__all__ = [
    "SmallLParams",
    "LargeLParams",
    "BoundBreakdown",
    "ConstantReport",
    "LevelPoint",
    "PRAWITZ_K_BOUND",
    "C_MIN",
    "L1_DEFAULT",
    "L0_DEFAULT",
    "prawitz_kernel",
    "kernel_minus_pole_abs",
    "small_L_limit",
    "c0_objective",
    "c0",
    "aex_upper",
    "c1_objective",
    "c1",
    "c1_sup",
    "c1_max",
    "admissible_L0",
    "absolute_constant",
    "round_up",
    "C1SupResult",
    "level_curve",
]

PRAWITZ_K_BOUND = 1.0253
C_MIN = 2.0
L1_DEFAULT = 0.65
L0_DEFAULT = 0.03
_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class SmallLParams:
    tau0: float
    tau1: float


@dataclass(frozen=True)
class LargeLParams:
    T0: float
    T1: float

    def scaled(self, L: float) -> tuple[float, float]:
        """(T₀L, T₁L³)."""
        return self.T0 * L, self.T1 * L ** 3


@dataclass(frozen=True)
class BoundBreakdown:
    total: float
    I1: float
    I2: float
    I3: float
    I4: float
    params: Union[SmallLParams, LargeLParams]
    L: float

    def as_dict(self) -> dict:
        d = {"total": self.total, "L": self.L, "I1": self.I1, "I2": self.I2, "I3": self.I3, "I4": self.I4}
        if isinstance(self.params, SmallLParams):
            d["tau0"] = self.params.tau0
            d["tau1"] = self.params.tau1
        else:
            d["T0"] = self.params.T0
            d["T1"] = self.params.T1
            d["T0_L"], d["T1_L3"] = self.params.scaled(self.L)
        return d


# ---------------------------------------------------------------------------
# small L: closed form
# ---------------------------------------------------------------------------

def small_L_limit(kind, eps: float) -> float:
    """Largest L₀ admitted by the closed-form regime for (kind, ε)."""
    kind = FractionKind.parse(kind)
    if math.isinf(eps):
        return math.inf
    g = truncation_geometry(eps, 1.0)
    lim = min((eps / 4.0) ** (1.0 / 3.0), g.L0_bar)
    if kind is FractionKind.ROZOVSKII:
        lim = min(lim, 3.0 * g.alpha / eps)
    return lim


def _esseen_brackets(eps, gamma, B, L):
    c = cubic_coefficient(gamma)
    if math.isinf(eps):
        b11 = _SQRT2 * c * (_SQRT_PI / 2.0)
        b12 = 2.0 * c
    else:
        x = t_thresholds(gamma)[0] ** 2 / (2.0 * eps * eps)
        b11 = (KAPPA / eps * gamma_lower(1.0, x) + eps / 12.0 * gamma_lower(2.0, x)
               + _SQRT2 * c * gamma_upper(1.5, x))
        b12 = (_SQRT2 * KAPPA / eps * gamma_lower(1.5, x) + _SQRT2 * eps / 12.0 * gamma_lower(2.5, x)
               + 2.0 * c * gamma_upper(2.0, x))
    b11 += 2.0 * B * L
    b12 += 1.5 * _SQRT_2PI * B * L
    return b11, b12


def _rozovskii_brackets(eps, gamma, B, L, h):
    _, t1, t2 = t_thresholds(gamma)
    x1 = h * t1 * t1 / (2.0 * eps * eps)
    x2 = h * t2 * t2 / (2.0 * eps * eps)
    h32, h2, h52 = h ** 1.5, h * h, h ** 2.5
    b11 = (KAPPA / (eps * h) * gamma_lower(1.0, x1) + eps / (12.0 * h2) * gamma_lower(2.0, x1)
           + eps / (6.0 * h2) * gamma_upper(2.0, x2) + 2.0 * B * L / h2)
    b12 = (_SQRT2 * KAPPA / (eps * h32) * gamma_lower(1.5, x1)
           + _SQRT2 * eps / (12.0 * h52) * gamma_lower(2.5, x1)
           + _SQRT2 * eps / (6.0 * h52) * gamma_upper(2.5, x2)
           + 1.5 * _SQRT_2PI * B * L / h52)
    if gamma < GAMMA_STAR:
        # middle branch |t|³/(6γ) on (t1/ε, t2/ε]; empty for γ ≥ γ*
        b11 += _SQRT2 / (6.0 * gamma * h32) * (_SQRT_PI / 2.0 - gamma_lower(1.5, x1) - gamma_upper(1.5, x2))
        b12 += 1.0 / (3.0 * gamma * h2) * (1.0 - gamma_lower(2.0, x1) - gamma_upper(2.0, x2))
    return b11, b12


def _check_small(ctx: BoundContext, tau0: float, tau1: float, L0: float) -> None:
    g = truncation_geometry(ctx.eps, ctx.L)
    if ctx.L > L0:
        raise ValueError("L must not exceed the regime cap L0")
    if L0 > small_L_limit(ctx.kind, ctx.eps):
        raise ValueError("L0 exceeds the admissible small-L bound for this eps")
    if not 0.0 < tau0 < g.tau0_bar:
        raise ValueError(f"tau0 must lie in (0, {g.tau0_bar:.6g})")
    lo = 0.0 if math.isinf(ctx.eps) else math.pi * L0 ** 3 / ctx.eps
    if not lo < tau1 < TAU1_BAR:
        raise ValueError(f"tau1 must lie in ({lo:.6g}, pi/4)")
    if tau1 < ctx.L ** 2 * tau0:
        raise ValueError("tau1 must be at least L^2 * tau0")


def c0_objective(ctx: BoundContext, params: SmallLParams, *, L0: float | None = None,
                 _k1: float | None = None) -> BoundBreakdown:
    """Closed-form majorant of Δ_n / L³ for small L, split into I₁..I₄."""
    tau0, tau1 = float(params.tau0), float(params.tau1)
    L = ctx.L
    L0 = L if L0 is None else float(L0)
    _check_small(ctx, tau0, tau1, L0)
    A = envelope_A(ctx.kind, tau0, ctx.eps, ctx.gamma, L)
    B = envelope_B(tau0, ctx.eps)
    if ctx.kind is FractionKind.ESSEEN:
        b11, b12 = _esseen_brackets(ctx.eps, ctx.gamma, B, L)
    else:
        h = h_factor(tau0, ctx.eps, L)
        if not h > 0:
            raise ValueError("h = 1 - eps*tau0^2*L/6 must be positive")
        b11, b12 = _rozovskii_brackets(ctx.eps, ctx.gamma, B, L, h)
    I1 = A / math.pi * b11 + L ** 3 * A / tau1 * b12
    k1 = k_tau(tau1) if _k1 is None else _k1
    if not k1 > 0:
        raise ValueError("k(tau1) must be positive")
    I2 = PRAWITZ_K_BOUND / (2.0 * math.pi * tau0 ** 3 * k1 ** 1.5) * gamma_upper(1.5, k1 * tau0 * tau0 / (L * L))
    I3 = math.sqrt(math.pi / 2.0) / tau1
    I4 = _SQRT2 / (math.pi * tau0 ** 3) * gamma_upper(1.5, tau0 * tau0 / (2.0 * L * L))
    return BoundBreakdown(I1 + I2 + I3 + I4, I1, I2, I3, I4, SmallLParams(tau0, tau1), L)


_C0_GRID = 32


def c0(ctx: BoundContext, *, L0: float | None = None) -> BoundBreakdown:
    """Minimize the closed-form majorant over the feasible (τ₀, τ₁) box."""
    L = ctx.L
    L0 = L if L0 is None else float(L0)
    if L0 > small_L_limit(ctx.kind, ctx.eps):
        raise ValueError("L0 exceeds the admissible small-L bound for this eps")
    g = truncation_geometry(ctx.eps, L)
    lo1 = 0.0 if math.isinf(ctx.eps) else math.pi * L0 ** 3 / ctx.eps
    if lo1 >= TAU1_BAR:
        raise ValueError("empty feasible region: pi*L0^3/eps >= pi/4")
    tau0_hi = g.tau0_bar
    if ctx.kind is FractionKind.ROZOVSKII:
        tau0_hi = min(tau0_hi, math.sqrt(6.0 / (ctx.eps * L)))

    def feasible(t0, t1):
        return 0.0 < t0 < tau0_hi and max(lo1, L * L * t0) <= t1 < TAU1_BAR and t1 > lo1

    def value(t0, t1, k1=None):
        if not feasible(t0, t1):
            return math.inf
        try:
            return c0_objective(ctx, SmallLParams(t0, t1), L0=L0, _k1=k1).total
        except ValueError:
            return math.inf

    t0_grid = tau0_hi * (np.arange(1, _C0_GRID + 1) / (_C0_GRID + 1))
    t1_grid = lo1 + (TAU1_BAR - lo1) * (np.arange(1, _C0_GRID + 1) / (_C0_GRID + 1))
    k_grid = k_tau(t1_grid)
    best = (math.inf, None, None)
    for t1, k1 in zip(t1_grid, k_grid):
        for t0 in t0_grid:
            v = value(t0, t1, float(k1))
            if v < best[0]:
                best = (v, t0, t1)
    if not math.isfinite(best[0]):
        raise ValueError("no feasible point found for the small-L majorant")
    res = optimize.minimize(
        lambda x: value(x[0], x[1]),
        x0=np.array([best[1], best[2]]),
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 2000,
                 "initial_simplex": np.array([[best[1], best[2]],
                                              [best[1] + 0.5 * tau0_hi / _C0_GRID, best[2]],
                                              [best[1], best[2] - 0.5 * (TAU1_BAR - lo1) / _C0_GRID]])},
    )
    x = res.x if res.fun <= best[0] else np.array([best[1], best[2]])
    return c0_objective(ctx, SmallLParams(float(x[0]), float(x[1])), L0=L0)


def aex_upper(kind, eps: float, gamma: float) -> float:
    """Closed-form L → 0 limit of the small-L majorant with τ₁ → π/4."""
    kind = FractionKind.parse(kind)
    eps = float(eps)
    gamma = float(gamma)
    if not (eps > 0 and gamma > 0):
        raise ValueError("eps and gamma must be positive")
    base = 4.0 / _SQRT_2PI
    if kind is FractionKind.ESSEEN:
        if math.isinf(eps):
            inv_g2 = 0.0 if math.isinf(gamma) else 1.0 / (gamma * gamma)
            return (4.0 + math.sqrt(1.0 / GAMMA_STAR ** 2 + inv_g2) / 6.0) / _SQRT_2PI
        b11, _ = _esseen_brackets(eps, gamma, 0.0, 0.0)
        return base + b11 / math.pi
    if math.isinf(eps):
        raise ValueError("the Rozovskii fraction needs a finite eps")
    b11, _ = _rozovskii_brackets(eps, gamma, 0.0, 0.0, 1.0)
    return base + b11 / math.pi


# ---------------------------------------------------------------------------
# smoothing kernel
# ---------------------------------------------------------------------------

# cot x = 1/x - Σ c_j x^{2j-1}
_COT_LAURENT = (1.0 / 3.0, 1.0 / 45.0, 2.0 / 945.0, 1.0 / 4725.0, 2.0 / 93555.0)
_KERNEL_SERIES_CUTOFF = 1e-3
_KERNEL_EDGE = 1e-9


def _cot_regular_part(x):
    """1/x - cot x for small |x| (odd power series)."""
    x2 = x * x
    acc = np.zeros_like(x)
    for c in reversed(_COT_LAURENT):
        acc = acc * x2 + c
    return acc * x


def prawitz_kernel(u):
    """K(u) = ½(1-|u|) + (i/2)[(1-|u|)cot(πu) + sgn(u)/π] on [-1, 1] \\ {0}; K(±1) = 0."""
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0) or np.any(u == 0.0):
        raise ValueError("kernel argument must lie in [-1, 1] without 0")
    au = np.abs(u)
    one = 1.0 - au
    with np.errstate(divide="ignore", invalid="ignore"):
        im = 0.5 * (one / np.tan(np.pi * u) + np.sign(u) / np.pi)
    out = 0.5 * one + 1j * im
    out = np.where(au >= 1.0 - _KERNEL_EDGE, 0.0 + 0.0j, out)
    return complex(out) if out.ndim == 0 else out


def kernel_abs(u):
    """|K(u)| for 0 < u ≤ 1 (vectorized, no complex temporaries)."""
    u = np.asarray(u, dtype=float)
    one = 1.0 - u
    with np.errstate(divide="ignore", invalid="ignore"):
        im = 0.5 * (one / np.tan(np.pi * u) + 1.0 / np.pi)
    out = np.hypot(0.5 * one, im)
    return np.where(u >= 1.0 - _KERNEL_EDGE, 0.0, out)


def kernel_minus_pole_abs(u):
    """|K(u) - i/(2πu)| for 0 < u ≤ 1, with a Laurent expansion near 0."""
    u = np.asarray(u, dtype=float)
    one = 1.0 - u
    pu = np.pi * u
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = 0.5 * (one / np.tan(pu) + 1.0 / np.pi - 1.0 / pu)
    series = -0.5 * one * _cot_regular_part(pu)
    im = np.where(u < _KERNEL_SERIES_CUTOFF, series, direct)
    im = np.where(u >= 1.0 - _KERNEL_EDGE, -0.5 / (np.pi * np.maximum(u, 1.0)), im)
    return np.hypot(0.5 * one, im)


# ---------------------------------------------------------------------------
# moderate L: quadrature
# ---------------------------------------------------------------------------

def _check_large(ctx: BoundContext, T0: float, T1: float) -> None:
    g = truncation_geometry(ctx.eps, ctx.L)
    if not 0.0 < T0 < g.tau0_bar / ctx.L:
        raise ValueError("T0 must lie in (0, tau0_bar(eps)/L)")
    if not T0 < T1 < TAU1_BAR / ctx.L ** 3:
        raise ValueError("T1 must lie in (T0, (pi/4)/L^3)")


def _i2_tail_bound(ctx: BoundContext, tc: float, T1: float) -> float:
    """Upper bound for (2/T₁)∫_{tc}^{T₁} |K(t/T₁)| |f̄_n(t)| dt.

    On [tc, T₁] the majorant is at most exp{-k t²} with k = k(L³T₁, 2ε tc)
    (k decreases in τ and increases in u), and |K(u)| ≤ 1.0253/(2π|u|).
    """
    u = math.inf if math.isinf(ctx.eps) else 2.0 * ctx.eps * tc
    k = k_capped(ctx.L ** 3 * T1, u)
    if not k > 0:
        return math.inf
    return PRAWITZ_K_BOUND / (math.pi * tc) * gaussian_power_tail(0.0, k, tc)


def _i2_cutoff(ctx: BoundContext, T0: float, T1: float, budget: float) -> float:
    tc = 2.0 * T0
    while tc < T1:
        if _i2_tail_bound(ctx, tc, T1) < budget:
            return tc
        tc *= 2.0
    return T1


def c1_integrals(ctx: BoundContext, T0: float, T1: float,
                 settings: QuadratureSettings = DEFAULT_QUADRATURE) -> tuple[float, float, float, float]:
    """Raw I₁..I₄ (not normalized by L³)."""
    inv = 1.0 / T1
    f1 = lambda t: kernel_abs(t * inv) * diff_bound(t, ctx)  # noqa: E731
    f2 = lambda t: kernel_abs(t * inv) * abs_chf_bound(t, ctx)  # noqa: E731
    f3 = lambda t: kernel_minus_pole_abs(t * inv) * np.exp(-0.5 * t * t)  # noqa: E731
    # breakpoints keep the Gaussian bulk resolved when the ranges are long
    near = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    upper = _i2_cutoff(ctx, T0, T1, settings.abs_tol * 0.1)
    far = T0 * 2.0 ** np.arange(1, 40)
    I1 = 2.0 * inv * integrate(f1, 0.0, T0, settings, breakpoints=near)
    I2 = 2.0 * inv * integrate(f2, T0, upper, settings, breakpoints=far[far < upper])
    I3 = 2.0 * inv * integrate(f3, 0.0, T0, settings, breakpoints=near)
    I4 = log_tail_integral(T0) / math.pi
    return I1, I2, I3, I4


def c1_objective(ctx: BoundContext, params: LargeLParams,
                 settings: QuadratureSettings = DEFAULT_QUADRATURE) -> BoundBreakdown:
    T0, T1 = float(params.T0), float(params.T1)
    _check_large(ctx, T0, T1)
    I1, I2, I3, I4 = c1_integrals(ctx, T0, T1, settings)
    n = ctx.L ** 3
    I1, I2, I3, I4 = I1 / n, I2 / n, I3 / n, I4 / n
    return BoundBreakdown(I1 + I2 + I3 + I4, I1, I2, I3, I4, LargeLParams(T0, T1), ctx.L)


def _t0_derivative(ctx: BoundContext, T0, T1: float):
    """d(I₁+I₂+I₃+I₄)/dT₀ at fixed T₁ (vectorized in T₀)."""
    T0 = np.asarray(T0, dtype=float)
    u = T0 / T1
    gauss = np.exp(-0.5 * T0 * T0)
    kk = kernel_abs(u)
    return (2.0 / T1 * kk * (diff_bound(T0, ctx) - abs_chf_bound(T0, ctx))
            + 2.0 / T1 * kernel_minus_pole_abs(u) * gauss
            - gauss / (math.pi * T0))


_T0_SCAN = 96


def optimal_T0(ctx: BoundContext, T1: float) -> float:
    """Best stationary point of the majorant in T₀ for a fixed T₁."""
    g = truncation_geometry(ctx.eps, ctx.L)
    hi = min(g.tau0_bar / ctx.L, T1) * (1.0 - 1e-7)
    grid = hi * np.arange(1, _T0_SCAN + 1) / _T0_SCAN
    d = _t0_derivative(ctx, grid, T1)
    # cumulative change of the majorant along the scan (trapezoid)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(grid))])
    up = np.flatnonzero((d[:-1] < 0.0) & (d[1:] >= 0.0))
    if up.size == 0:
        return float(grid[-1] if d[-1] < 0.0 else grid[0])
    j = int(up[np.argmin(cum[up])])
    if d[-1] < 0.0 and cum[-1] < cum[j]:
        return float(grid[-1])
    return float(optimize.brentq(lambda x: float(_t0_derivative(ctx, x, T1)), grid[j], grid[j + 1],
                                 xtol=1e-10, rtol=1e-10))


def _objective_tau1(ctx: BoundContext, tau1: float, settings) -> BoundBreakdown:
    T1 = tau1 / ctx.L ** 3
    return c1_objective(ctx, LargeLParams(optimal_T0(ctx, T1), T1), settings)


_TAU1_BRACKET = (0.45, TAU1_BAR * (1.0 - 1e-9))


def c1(ctx: BoundContext, settings: QuadratureSettings = DEFAULT_QUADRATURE, *,
       tau1_bracket: tuple[float, float] | None = None, xatol: float = 1e-6) -> BoundBreakdown:
    """Minimize the quadrature majorant over (T₀, T₁) at a fixed L."""
    lo, hi = tau1_bracket or _TAU1_BRACKET
    # keep T1 above the admissible T0 range's start
    lo = max(lo, ctx.L ** 2 * 1e-6)
    cache: dict[float, BoundBreakdown] = {}

    def f(tau1: float) -> float:
        if tau1 not in cache:
            cache[tau1] = _objective_tau1(ctx, tau1, settings)
        return cache[tau1].total

    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": xatol})
    f(float(res.x))
    return min(cache.values(), key=lambda b: b.total)


# ---------------------------------------------------------------------------
# certified sweep over L
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class C1SupResult:
    """Certified upper bound for max C₁ over [L_lo, L_hi].

    ``value`` is the largest cell bound C₁(L″)(L″/L′)³, ``best`` the largest
    point evaluation and ``breakdown`` the optimized majorant at ``argmax_L``.
    """

    value: float
    argmax_L: float
    breakdown: BoundBreakdown
    best: float
    n_cells: int
    n_evaluations: int
    grid: tuple = field(default=(), repr=False)

    def __iter__(self):
        return iter((self.value, self.argmax_L, self.breakdown))


_N_ANCHORS = 7
_INITIAL_CELLS = 64
_MAX_SWEEP_EVALS = 4000


def _family(ctx_family, L: float) -> BoundContext:
    if isinstance(ctx_family, BoundContext):
        return ctx_family.with_L(L)
    kind, eps, gamma = ctx_family
    return BoundContext(kind, eps, gamma, L)


def c1_sup(ctx_family, L_lo: float = L0_DEFAULT, L_hi: float = L1_DEFAULT, *,
           tol: float = 5e-3, settings: QuadratureSettings = DEFAULT_QUADRATURE,
           initial_cells: int = _INITIAL_CELLS) -> C1SupResult:
    """Certified bound for max_{L_lo ≤ L ≤ L_hi} C₁(ε, γ, L).

    Uses C₁(L″)(L″/L′)³ on every cell [L′, L″] of a refining geometric grid.
    Point values come from the majorant at T₁L³ interpolated from a few fully
    optimized anchors (T₀ always optimized), so each is a valid upper bound
    for C₁ at its node.
    """
    L_lo, L_hi = float(L_lo), float(L_hi)
    if not 0.0 < L_lo <= L_hi:
        raise ValueError("need 0 < L_lo <= L_hi")
    if L_lo == L_hi:
        b = c1(_family(ctx_family, L_hi), settings)
        return C1SupResult(b.total, L_hi, b, b.total, 1, 1, ((L_hi, b.total),))

    anchor_L = [float(L) for L in np.geomspace(L_lo, L_hi, _N_ANCHORS)]
    anchor_tau1: list[float] = []
    vals: dict[float, float] = {}
    full: dict[float, BoundBreakdown] = {}
    n_eval = 0

    def tau1_guess(L: float) -> float:
        return float(np.interp(math.log(L), np.log(anchor_L), anchor_tau1))

    def full_point(L: float, guess: float | None = None) -> BoundBreakdown:
        nonlocal n_eval
        n_eval += 1
        bracket = None
        if guess is not None:
            bracket = (max(_TAU1_BRACKET[0], guess - 0.05), min(_TAU1_BRACKET[1], guess + 0.05))
        b = c1(_family(ctx_family, L), settings, tau1_bracket=bracket)
        full[L] = b
        vals[L] = min(vals.get(L, math.inf), b.total)
        return b

    def cheap_point(L: float) -> BoundBreakdown:
        nonlocal n_eval
        n_eval += 1
        if n_eval > _MAX_SWEEP_EVALS:
            raise RuntimeError("L-grid refinement exceeded its evaluation budget")
        return _objective_tau1(_family(ctx_family, L), tau1_guess(L), settings)

    for L in anchor_L:
        anchor_tau1.append(full_point(L).params.T1 * L ** 3)

    def add_anchor(L: float, b: BoundBreakdown) -> None:
        i = int(np.searchsorted(anchor_L, L))
        if i < len(anchor_L) and anchor_L[i] == L:
            return
        anchor_L.insert(i, L)
        anchor_tau1.insert(i, b.params.T1 * L ** 3)

    for L in np.geomspace(L_lo, L_hi, initial_cells + 1):
        L = float(L)
        if L not in vals:
            vals[L] = cheap_point(L).total
    nodes = sorted(vals)

    def cell_bound(i: int) -> float:
        a, b = nodes[i], nodes[i + 1]
        return vals[b] * (b / a) ** 3

    # Each cell's right endpoint is fully optimized before the cell is split,
    # which also feeds a new τ₁ anchor to later cheap evaluations.
    while True:
        bounds = [cell_bound(i) for i in range(len(nodes) - 1)]
        best = max(vals.values())
        i = int(np.argmax(bounds))
        if bounds[i] - best < tol:
            break
        right = nodes[i + 1]
        if right not in full:
            add_anchor(right, full_point(right, tau1_guess(right)))
            continue
        mid = math.sqrt(nodes[i] * nodes[i + 1])
        vals[mid] = cheap_point(mid).total
        nodes.insert(i + 1, mid)
    certified = max(bounds)

    # locate the maximizer between the neighbours of the best node
    j = int(np.argmax([vals[L] for L in nodes]))
    lo = nodes[max(j - 1, 0)]
    hi = nodes[min(j + 1, len(nodes) - 1)]
    L_star = nodes[j]
    if hi > lo:
        res = optimize.minimize_scalar(lambda L: -cheap_point(L).total, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-6})
        L_star = float(res.x)
    bd = full[L_star] if L_star in full else full_point(L_star, tau1_guess(L_star))
    return C1SupResult(certified, L_star, bd, max(vals.values()), len(nodes) - 1, n_eval,
                       tuple((L, vals[L]) for L in nodes))


# ---------------------------------------------------------------------------
# the absolute constant and its level curves
# ---------------------------------------------------------------------------

_L0_STRICT = 1.0 - 1e-9


def admissible_L0(kind, eps: float, requested: float = L0_DEFAULT) -> float:
    """min(requested, admissible bound); the cube-root bound is strict so it is nudged inward."""
    requested = float(requested)
    if not requested > 0:
        raise ValueError("L0 must be positive")
    lim = small_L_limit(kind, eps)
    if requested < lim:
        return requested
    return lim * _L0_STRICT


def round_up(x: float, digits: int = 2) -> float:
    """Round toward +∞ at ``digits`` decimals (keeps upper bounds valid)."""
    scale = 10.0 ** digits
    y = math.ceil(x * scale - 1e-9) / scale
    return y if y >= x else y + 1.0 / scale


@dataclass(frozen=True)
class ConstantReport:
    kind: FractionKind
    eps: float
    gamma: float
    value: float
    c_min: float
    c0_value: float
    c1_value: float
    L0: float
    L1: float
    argmax_L: float
    small: BoundBreakdown = field(repr=False)
    large: BoundBreakdown = field(repr=False)
    c1_best: float = math.nan

    @property
    def branch(self) -> str:
        return max((self.c_min, "c_min"), (self.c0_value, "small_L"), (self.c1_value, "large_L"))[1]

    def rounded(self, digits: int = 2) -> float:
        return round_up(self.value, digits)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "eps": self.eps,
            "gamma": self.gamma,
            "value": self.value,
            "rounded": self.rounded(),
            "branch": self.branch,
            "c_min": self.c_min,
            "c0": self.c0_value,
            "c1_sup": self.c1_value,
            "c1_best": self.c1_best,
            "L0": self.L0,
            "L1": self.L1,
            "argmax_L": self.argmax_L,
            "small_L": self.small.as_dict(),
            "large_L": self.large.as_dict(),
        }


def absolute_constant(ctx_family, *, L0: float = L0_DEFAULT, L1: float = L1_DEFAULT,
                      tol: float = 2e-3, settings: QuadratureSettings = DEFAULT_QUADRATURE):
    """max{C_min, C₀(ε,γ,L₀), certified sup of C₁ over [L₀, L₁]}.

    Returns ``(value, report)``; ``value`` is unrounded.
    """
    if isinstance(ctx_family, BoundContext):
        kind, eps, gamma = ctx_family.kind, ctx_family.eps, ctx_family.gamma
    else:
        kind, eps, gamma = ctx_family
    kind = FractionKind.parse(kind)
    eps, gamma = float(eps), float(gamma)
    L0 = admissible_L0(kind, eps, L0)
    if not L0 < L1:
        raise ValueError("need L0 < L1")
    small = c0(BoundContext(kind, eps, gamma, L0))
    sup = c1_sup((kind, eps, gamma), L0, L1, tol=tol, settings=settings)
    value = max(C_MIN, small.total, sup.value)
    report = ConstantReport(kind, eps, gamma, value, C_MIN, small.total, sup.value, L0, L1,
                            sup.argmax_L, small, sup.breakdown, sup.best)
    return value, report


@dataclass(frozen=True)
class LevelPoint:
    """Smallest γ with C(ε, γ) ≤ target, or ``gamma=None`` with a reason."""

    eps: float
    gamma: float | None
    value: float | None = None
    note: str = ""

    @property
    def attainable(self) -> bool:
        return self.gamma is not None


_LEVEL_GAMMA_LO = 0.05
_LEVEL_GAMMA_HI = 1e3


def _level_point(kind, target, eps, *, gamma_rtol, constant, floor_check):
    # C ≥ Ĉ*(ε, ∞) for the constant and its closed-form limit
    if floor_check and target < aex_upper(kind, eps, math.inf):
        return LevelPoint(eps, None, note="target below the L -> 0 limit")
    v_inf = constant(eps, math.inf)
    if v_inf > target:
        return LevelPoint(eps, None, v_inf, note="not attainable even at gamma = inf")
    lo, hi = _LEVEL_GAMMA_LO, _LEVEL_GAMMA_HI
    v_at_hi = constant(eps, hi)
    if v_at_hi > target:
        return LevelPoint(eps, math.inf, v_inf, note="attained only in the limit gamma -> inf")
    if constant(eps, lo) <= target:
        return LevelPoint(eps, lo, note=f"attained at the lower search limit {lo}")
    # bisection in log γ on a nonincreasing function
    while hi / lo > 1.0 + gamma_rtol:
        mid = math.sqrt(lo * hi)
        v = constant(eps, mid)
        if v <= target:
            hi, v_at_hi = mid, v
        else:
            lo = mid
    return LevelPoint(eps, hi, v_at_hi)


LEVEL_MEASURES = ("constant", "c1_max", "aex")


def _level_measure(kind, measure: str, constant_kw: dict):
    if measure == "constant":
        return lambda eps, gamma: absolute_constant((kind, eps, gamma), **constant_kw)[0]
    if measure == "c1_max":
        L0 = constant_kw.get("L0", L0_DEFAULT)
        L1 = constant_kw.get("L1", L1_DEFAULT)
        return lambda eps, gamma: c1_max((kind, eps, gamma), admissible_L0(kind, eps, L0), L1).total
    if measure == "aex":
        return lambda eps, gamma: aex_upper(kind, eps, gamma)
    raise ValueError(f"measure must be one of {LEVEL_MEASURES}")


def level_curve(kind, target: float, eps_grid, *, measure: str = "constant", gamma_rtol: float = 5e-3,
                **constant_kw) -> list[LevelPoint]:
    """For each ε the smallest γ (to relative accuracy ``gamma_rtol``) with C(ε, γ) ≤ target.

    ``measure`` selects C: the certified absolute constant (default), the
    located maximum of C₁ over [L₀, L₁] (uncertified, as in the published
    level curves), or the closed-form L → 0 limit. Failures are reported per
    point in ``LevelPoint.note`` rather than raised.
    """
    kind = FractionKind.parse(kind)
    target = float(target)
    constant = _level_measure(kind, measure, constant_kw)
    out = []
    for eps in eps_grid:
        eps = float(eps)
        try:
            out.append(_level_point(kind, target, eps, gamma_rtol=gamma_rtol, constant=constant,
                                    floor_check=measure != "c1_max"))
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            out.append(LevelPoint(eps, None, note=f"failed: {exc}"))
    return out


def c1_max(ctx_family, L_lo: float = L0_DEFAULT, L_hi: float = L1_DEFAULT, *, n_grid: int = 9,
           xatol: float = 1e-5, settings: QuadratureSettings = DEFAULT_QUADRATURE) -> BoundBreakdown:
    """Locate the maximizer of L ↦ C₁(ε, γ, L) (no certificate; see ``c1_sup``).

    Full optimization on a coarse geometric grid, then bounded Brent between
    the neighbours of the best grid point.
    """
    cache: dict[float, BoundBreakdown] = {}

    def full(L: float) -> BoundBreakdown:
        L = float(L)
        if L not in cache:
            cache[L] = c1(_family(ctx_family, L), settings)
        return cache[L]

    grid = np.geomspace(L_lo, L_hi, n_grid)
    vals = [full(L).total for L in grid]
    j = int(np.argmax(vals))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, n_grid - 1)]
    optimize.minimize_scalar(lambda L: -full(L).total, bounds=(lo, hi), method="bounded",
                             options={"xatol": xatol})
    return max(cache.values(), key=lambda b: b.total)
