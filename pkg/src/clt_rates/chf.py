"""Majorants for the characteristic function of a normalized sum.

All ``t``-dependent functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .constants import (
    GAMMA_STAR,
    KAPPA,
    k_capped,
    k_tau,
    t_thresholds,
    truncation_geometry,
)

__all__ = [
    "FractionKind",
    "BoundContext",
    "cubic_coefficient",
    "p_esseen",
    "p_rozovskii",
    "p_kind",
    "envelope_B",
    "envelope_B_full",
    "envelope_A",
    "h_factor",
    "abs_chf_bound",
    "abs_chf_bound_flat",
    "diff_bound",
    "diff_bound_small_L",
]


class FractionKind(enum.Enum):
    ESSEEN = "esseen"
    ROZOVSKII = "rozovskii"

    @classmethod
    def parse(cls, value) -> "FractionKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if member.value == key or member.value[0] == key:
                return member
        raise ValueError(f"unknown fraction kind {value!r}")


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


@dataclass(frozen=True)
class BoundContext:
    """(kind, ε, γ, L); ε and γ may be ``math.inf``."""

    kind: FractionKind
    eps: float
    gamma: float
    L: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FractionKind.parse(self.kind))
        object.__setattr__(self, "eps", _positive("eps", self.eps))
        object.__setattr__(self, "gamma", _positive("gamma", self.gamma))
        L = _positive("L", self.L)
        if math.isinf(L):
            raise ValueError("L must be finite")
        object.__setattr__(self, "L", L)
        if self.kind is FractionKind.ROZOVSKII and math.isinf(self.eps):
            raise ValueError("the Rozovskii fraction needs a finite eps")

    def with_L(self, L: float) -> "BoundContext":
        return BoundContext(self.kind, self.eps, self.gamma, L)

    @property
    def geometry(self):
        return truncation_geometry(self.eps, self.L)


def _as_float_array(t):
    return np.abs(np.asarray(t, dtype=float))


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def cubic_coefficient(gamma: float) -> float:
    """√(6ϰγ² + 1)/(6γ), written to stay finite at γ = ∞."""
    gamma = _positive("gamma", gamma)
    if math.isinf(gamma):
        return math.sqrt(KAPPA / 6.0)
    return math.sqrt(KAPPA / 6.0 + 1.0 / (36.0 * gamma * gamma))


def p_esseen(t, eps: float, gamma: float):
    eps = _positive("eps", eps)
    at = _as_float_array(t)
    cubic = cubic_coefficient(gamma) * at ** 3
    if math.isinf(eps):
        return _out(cubic)
    t_g = t_thresholds(gamma)[0]
    t2 = at * at
    quartic = KAPPA * t2 / eps + eps * t2 * t2 / 24.0
    return _out(np.where(eps * at <= t_g, quartic, cubic))


def p_rozovskii(t, eps: float, gamma: float):
    eps = _positive("eps", eps)
    gamma = _positive("gamma", gamma)
    if math.isinf(eps):
        raise ValueError("the Rozovskii majorant needs a finite eps")
    at = _as_float_array(t)
    _, t1, t2 = t_thresholds(gamma)
    s = eps * at
    tt = at * at
    low = KAPPA * tt / eps + eps * tt * tt / 24.0
    high = eps * tt * tt / 12.0
    if gamma >= GAMMA_STAR:
        out = np.where(s <= t1, low, high)
    else:
        mid = at ** 3 / (6.0 * gamma)
        out = np.where(s <= t1, low, np.where(s <= t2, mid, high))
    return _out(out)


def p_kind(kind: FractionKind, t, eps: float, gamma: float):
    if FractionKind.parse(kind) is FractionKind.ESSEEN:
        return p_esseen(t, eps, gamma)
    return p_rozovskii(t, eps, gamma)


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------

def envelope_B(tau, eps: float):
    """B(τ, ε) = √(α/2)/(2 - ατ²) for 0 ≤ τ < τ̄₀(ε)."""
    g = truncation_geometry(eps, 1.0)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0) or np.any(tau >= g.tau0_bar):
        raise ValueError("tau must lie in [0, tau0_bar(eps))")
    return _out(math.sqrt(g.alpha / 2.0) / (2.0 - g.alpha * tau * tau))


_LOG_SERIES_CUTOFF = 1e-4


def envelope_B_full(u, eps: float, L: float):
    """B(u, ε, L) = -4α₁/(α²u⁴) [ln(1 - αu²/2) + αu²/2] for 0 ≤ u < τ̄₀(ε)."""
    g = truncation_geometry(eps, L)
    u = np.asarray(u, dtype=float)
    if np.any(u < 0) or np.any(u >= g.tau0_bar):
        raise ValueError("u must lie in [0, tau0_bar(eps))")
    x = 0.5 * g.alpha * u * u
    # -[ln(1-x)+x]/x² = Σ_{j≥0} x^j/(j+2)
    small = x < _LOG_SERIES_CUTOFF
    series = 0.5 + x / 3.0 + x * x / 4.0 + x ** 3 / 5.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = -(np.log1p(-x) + x) / (x * x)
    return _out(g.alpha1 * np.where(small, series, direct))


def h_factor(tau0: float, eps: float, L: float) -> float:
    """h = 1 - ετ₀²L/6 (1 at ε = ∞ is never used; Rozovskii needs finite ε)."""
    return 1.0 - eps * tau0 * tau0 * L / 6.0


def envelope_A(kind, tau0: float, eps: float, gamma: float, L: float) -> float:
    kind = FractionKind.parse(kind)
    g = truncation_geometry(eps, L)
    if not 0 <= tau0 < g.tau0_bar:
        raise ValueError("tau0 must lie in [0, tau0_bar(eps))")
    if L > g.L0_bar:
        raise ValueError("L exceeds the admissible bound L0_bar(eps)")
    expo = tau0 ** 4 * envelope_B(tau0, eps)
    if not math.isinf(eps):
        expo += KAPPA / eps * L * tau0 * tau0
    inv6g = 0.0 if math.isinf(gamma) else tau0 ** 3 / (6.0 * gamma)
    if kind is FractionKind.ESSEEN:
        expo += inv6g + math.sqrt(KAPPA / 3.0) * tau0 ** 3
    elif gamma < GAMMA_STAR:
        expo += inv6g
    return math.exp(expo)


# ---------------------------------------------------------------------------
# bounds on |f_n(t)| and |f_n(t) - exp(-t²/2)|
# ---------------------------------------------------------------------------

def abs_chf_bound(t, ctx: BoundContext):
    """exp{-k(L³|t|, 2ε|t|) t²}."""
    at = _as_float_array(t)
    scalar = at.ndim == 0
    at = np.atleast_1d(at)
    out = np.ones(at.shape)
    nz = at > 0
    if np.any(nz):
        tn = at[nz]
        u = np.full(tn.shape, np.inf) if math.isinf(ctx.eps) else 2.0 * ctx.eps * tn
        k = k_capped(ctx.L ** 3 * tn, u)
        out[nz] = np.exp(-k * tn * tn)
    return float(out[0]) if scalar else out


def abs_chf_bound_flat(t, tau1: float, *, L: float | None = None, L0: float | None = None, eps: float | None = None):
    """exp{-k(τ₁) t²}; when L, L₀, ε are given the validity region is enforced."""
    at = _as_float_array(t)
    if L is not None:
        if eps is None or L0 is None:
            raise ValueError("checking validity needs L, L0 and eps together")
        if L > L0:
            raise ValueError("L must not exceed L0")
        if not math.isinf(eps) and tau1 < math.pi * L0 ** 3 / eps:
            raise ValueError("tau1 is below pi*L0^3/eps")
        if np.any(at > tau1 / L ** 3):
            raise ValueError("|t| exceeds tau1/L^3")
    return _out(np.exp(-k_tau(tau1) * at * at))


def diff_bound(t, ctx: BoundContext):
    """(exp{L³p(t) + L⁴t⁴B(L|t|, ε, L)} - 1) e^{-t²/2} for L|t| < τ̄₀(ε)."""
    at = _as_float_array(t)
    L = ctx.L
    p = p_kind(ctx.kind, at, ctx.eps, ctx.gamma)
    B = envelope_B_full(L * at, ctx.eps, L)
    expo = L ** 3 * p + L ** 4 * at ** 4 * B
    return _out(np.expm1(expo) * np.exp(-0.5 * at * at))


def diff_bound_small_L(t, ctx: BoundContext, tau0: float):
    """Closed-form envelope valid for L ≤ L̄₀(ε), L|t| < τ₀ ≤ τ̄₀(ε)."""
    at = _as_float_array(t)
    L = ctx.L
    g = ctx.geometry
    if L > g.L0_bar:
        raise ValueError("L exceeds L0_bar(eps)")
    if not 0 < tau0 < g.tau0_bar:
        raise ValueError("tau0 must lie in (0, tau0_bar(eps))")
    if np.any(L * at >= tau0):
        raise ValueError("L|t| must stay below tau0")
    A = envelope_A(ctx.kind, tau0, ctx.eps, ctx.gamma, L)
    B = envelope_B(tau0, ctx.eps)
    p = p_kind(ctx.kind, at, ctx.eps, ctx.gamma)
    core = A * (p + B * L * at ** 4) * L ** 3
    if ctx.kind is FractionKind.ESSEEN:
        return _out(core * np.exp(-0.5 * at * at))
    h = h_factor(tau0, ctx.eps, L)
    if not h > 0:
        raise ValueError("h = 1 - eps*tau0^2*L/6 must be positive")
    return _out(core * np.exp(-0.5 * h * at * at))
