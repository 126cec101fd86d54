"""Finite discrete summands: tail moments, the Lindeberg-type fractions and exact Δ_n.

Atoms built from integers, ``Fraction`` or rational strings stay exact, so
identities such as 643/675 can be checked with ``==``. Anything involving a
float drops to float arithmetic.
"""
from __future__ import annotations

import json
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .special import std_normal_cdf

__all__ = [
    "DiscreteDistribution",
    "SummandSystem",
    "FractionReport",
    "ParetoMoments",
    "ConvolutionTooLarge",
    "sigma_tail",
    "mu_trunc",
    "esseen_fraction",
    "rozovskii_fraction",
    "lyapunov_fraction",
    "osipov_fraction",
    "lindeberg_fraction",
    "fraction_report",
    "symmetrize",
    "quadratic_tail_ratio",
    "chf",
    "convolution",
    "kolmogorov_distance",
    "scenario",
    "SCENARIOS",
    "extremal_two_point",
    "parse_number",
    "load_system",
    "loads_system",
]

Number = Union[Fraction, float]

SUM_TOL = 1e-12
MERGE_TOL = 1e-12
DEFAULT_ATOM_CAP = 2_000_000


def parse_number(value) -> Number:
    """int/Fraction/"a/b"/decimal string → Fraction; float → float; "inf" → math.inf."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Real):
        return float(value)
    if isinstance(value, str):
        s = value.strip()
        if s.lower() in {"inf", "+inf", "infinity"}:
            return math.inf
        try:
            return Fraction(s)
        except ValueError:
            return float(s)
    raise TypeError(f"cannot interpret {value!r} as a number")


def _exact(*values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def _sqrt(q: Number) -> Number:
    """Exact square root of a rational when it is a perfect square, else float."""
    if isinstance(q, Fraction) and q >= 0:
        rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
        if rn * rn == q.numerator and rd * rd == q.denominator:
            return Fraction(rn, rd)
    return math.sqrt(q)


def _as_float(x) -> float:
    return float(x)


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteDistribution:
    """Atoms (x, p) with p > 0, strictly increasing x and Σp = 1."""

    xs: tuple
    ps: tuple

    def __post_init__(self) -> None:
        xs = tuple(parse_number(x) for x in self.xs)
        ps = tuple(parse_number(p) for p in self.ps)
        if not xs or len(xs) != len(ps):
            raise ValueError("need a nonempty list of (x, p) pairs")
        if any(not math.isfinite(x) for x in xs):
            raise ValueError("atoms must be finite")
        if any(not p > 0 for p in ps):
            raise ValueError("masses must be positive")
        order = sorted(range(len(xs)), key=lambda i: xs[i])
        xs = tuple(xs[i] for i in order)
        ps = tuple(ps[i] for i in order)
        if any(a == b for a, b in zip(xs, xs[1:])):
            raise ValueError("duplicate atom")
        total = sum(ps)
        if total != 1:
            if abs(total - 1) > SUM_TOL:
                raise ValueError(f"masses sum to {float(total)!r}, not 1")
            if _exact(*ps):  # rounding in decimal input: fall back to floats
                ps = tuple(float(p) for p in ps)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ps", ps)

    @classmethod
    def from_atoms(cls, atoms: Iterable[Sequence]) -> "DiscreteDistribution":
        atoms = list(atoms)
        return cls(tuple(a[0] for a in atoms), tuple(a[1] for a in atoms))

    @property
    def atoms(self) -> list[tuple]:
        return list(zip(self.xs, self.ps))

    @property
    def is_exact(self) -> bool:
        return _exact(*self.xs, *self.ps)

    def moment(self, k: int, absolute: bool = False) -> Number:
        if absolute:
            return sum(p * abs(x) ** k for x, p in zip(self.xs, self.ps))
        return sum(p * x ** k for x, p in zip(self.xs, self.ps))

    @property
    def mean(self) -> Number:
        return self.moment(1)

    @property
    def variance(self) -> Number:
        m = self.mean
        return self.moment(2) - m * m

    def has_zero_mean(self, tol: float = SUM_TOL) -> bool:
        m = self.mean
        return m == 0 if self.is_exact else abs(m) <= tol

    def negated(self) -> "DiscreteDistribution":
        return DiscreteDistribution(tuple(-x for x in self.xs), self.ps)

    def magnitudes(self) -> list:
        return sorted({abs(x) for x in self.xs if x != 0})


def sigma_tail(d: DiscreteDistribution, z) -> Number:
    """E X² I(|X| ≥ z)."""
    if z < 0:
        raise ValueError("z must be nonnegative")
    return sum((p * x * x for x, p in zip(d.xs, d.ps) if abs(x) >= z), Fraction(0))


def mu_trunc(d: DiscreteDistribution, z) -> Number:
    """E X³ I(|X| < z)."""
    if z < 0:
        raise ValueError("z must be nonnegative")
    return sum((p * x ** 3 for x, p in zip(d.xs, d.ps) if abs(x) < z), Fraction(0))


def _abs_trunc(d: DiscreteDistribution, z, power) -> Number:
    return sum((p * abs(x) ** power for x, p in zip(d.xs, d.ps) if abs(x) < z), Fraction(0))


@dataclass(frozen=True)
class SummandSystem:
    """Independent summands given as (distribution, repeat count) blocks."""

    blocks: tuple

    def __post_init__(self) -> None:
        blocks = []
        for item in self.blocks:
            d, n = (item, 1) if isinstance(item, DiscreteDistribution) else item
            if not isinstance(d, DiscreteDistribution):
                raise TypeError("blocks must hold DiscreteDistribution objects")
            if int(n) != n or n < 1:
                raise ValueError("repeat counts must be positive integers")
            if not d.has_zero_mean():
                raise ValueError("every summand must have zero mean")
            blocks.append((d, int(n)))
        if not blocks:
            raise ValueError("a system needs at least one summand")
        object.__setattr__(self, "blocks", tuple(blocks))
        if not self.B2 > 0:
            raise ValueError("degenerate system: B_n = 0")

    @classmethod
    def iid(cls, d: DiscreteDistribution, n: int = 1) -> "SummandSystem":
        return cls(((d, n),))

    @property
    def n(self) -> int:
        return sum(c for _, c in self.blocks)

    @property
    def B2(self) -> Number:
        return sum(c * d.variance for d, c in self.blocks)

    @property
    def B(self) -> Number:
        return _sqrt(self.B2)

    @property
    def is_exact(self) -> bool:
        return all(d.is_exact for d, _ in self.blocks)

    def magnitudes(self) -> list:
        return sorted({m for d, _ in self.blocks for m in d.magnitudes()})

    def sum_sigma(self, z) -> Number:
        return sum(c * sigma_tail(d, z) for d, c in self.blocks)

    def sum_mu(self, z) -> Number:
        return sum(c * mu_trunc(d, z) for d, c in self.blocks)

    def L(self, z) -> Number:
        """Normalized Lindeberg fraction L_n(z)."""
        return self.sum_sigma(z * self.B) / self.B2


# ---------------------------------------------------------------------------
# fractions
# ---------------------------------------------------------------------------

def _limit(sys: SummandSystem, eps) -> Number:
    eps = parse_number(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    return math.inf if math.isinf(eps) else eps * sys.B


def _times(gamma, value):
    # γ·|M| with the convention ∞·0 = 0
    if value == 0:
        return 0
    return gamma * value


def _sup_zL(sys: SummandSystem, Z, gamma=0) -> Number:
    """sup over 0 < z ≤ Z of γ|Σμ(z)| + zΣσ²(z), by right endpoints of constancy intervals.

    On each interval between consecutive atom magnitudes both sums are
    constant and the objective increases in z.
    """
    cands = [m for m in sys.magnitudes() if m <= Z]
    if math.isfinite(Z):
        cands.append(Z)
    best = Fraction(0)
    for z in cands:
        v = _times(gamma, abs(sys.sum_mu(z))) + z * sys.sum_sigma(z)
        if v > best:
            best = v
    if math.isinf(Z):
        v = _times(gamma, abs(sys.sum_mu(math.inf)))
        best = max(best, v)
    return best


def esseen_fraction(sys: SummandSystem, eps, gamma) -> Number:
    """L_E³(ε, γ) = sup_{0<z≤ε} {γ|M_n(z)| + z L_n(z)}."""
    gamma = parse_number(gamma)
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return _sup_zL(sys, _limit(sys, eps), gamma) / sys.B ** 3


def rozovskii_fraction(sys: SummandSystem, eps, gamma) -> Number:
    """L_R³(ε, γ) = γ|M_n(ε)| + sup_{0<z≤ε} z L_n(z)."""
    gamma = parse_number(gamma)
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    Z = _limit(sys, eps)
    if math.isinf(Z):
        raise ValueError("the Rozovskii fraction needs a finite eps")
    return (_times(gamma, abs(sys.sum_mu(Z))) + _sup_zL(sys, Z)) / sys.B ** 3


def lyapunov_fraction(sys: SummandSystem, delta=1) -> Number:
    """L_{2+δ,n} = Σ E|X_k|^{2+δ} / B_n^{2+δ}."""
    delta = parse_number(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    power = 2 + delta
    if isinstance(power, Fraction) and power.denominator == 1:
        power = int(power)
    total = sum(c * d.moment(power, absolute=True) for d, c in sys.blocks)
    B = sys.B
    return total / B ** power


def lindeberg_fraction(sys: SummandSystem, z) -> Number:
    return sys.L(parse_number(z))


def osipov_fraction(sys: SummandSystem, eps=1) -> Number:
    """Λ_n(ε) + L_n(ε)."""
    Z = _limit(sys, eps)
    B = sys.B
    lam = sum(c * _abs_trunc(d, Z, 3) for d, c in sys.blocks) / B ** 3
    return lam + sys.sum_sigma(Z) / sys.B2


@dataclass(frozen=True)
class FractionReport:
    esseen: Number
    rozovskii: Number | None
    lyapunov: Number
    osipov: Number
    eps: Number
    gamma: Number
    delta: Number

    def as_dict(self) -> dict:
        def f(v):
            return None if v is None else float(v)
        return {"eps": f(self.eps), "gamma": f(self.gamma), "delta": f(self.delta),
                "esseen": f(self.esseen), "rozovskii": f(self.rozovskii),
                "lyapunov": f(self.lyapunov), "osipov": f(self.osipov)}


def fraction_report(sys: SummandSystem, eps=1, gamma=1, delta=1) -> FractionReport:
    eps = parse_number(eps)
    roz = None if math.isinf(eps) else rozovskii_fraction(sys, eps, gamma)
    osi_eps = 1 if math.isinf(eps) else eps
    return FractionReport(esseen_fraction(sys, eps, gamma), roz, lyapunov_fraction(sys, delta),
                          osipov_fraction(sys, osi_eps), eps, parse_number(gamma), parse_number(delta))


# ---------------------------------------------------------------------------
# symmetrization
# ---------------------------------------------------------------------------

def _merge_exact(pairs) -> DiscreteDistribution:
    acc: dict = {}
    for x, p in pairs:
        acc[x] = acc.get(x, 0) + p
    return DiscreteDistribution(tuple(acc), tuple(acc.values()))


def symmetrize(d: DiscreteDistribution) -> DiscreteDistribution:
    """Distribution of X - X' with X' an independent copy."""
    pairs = ((x - y, p * q) for x, p in zip(d.xs, d.ps) for y, q in zip(d.xs, d.ps))
    if d.is_exact:
        return _merge_exact(pairs)
    xs, ps = _merge_float(*map(np.array, zip(*pairs)))
    return DiscreteDistribution(tuple(xs.tolist()), tuple(ps.tolist()))


def quadratic_tail_ratio(d: DiscreteDistribution, z) -> Number:
    """σ_s²(z)/σ²(z/2); at most 4 for zero-mean d."""
    z = parse_number(z)
    if not z > 0:
        raise ValueError("z must be positive")
    denom = sigma_tail(d, z / 2)
    if denom == 0:
        raise ZeroDivisionError("ratio undefined: sigma^2(z/2) = 0")
    return sigma_tail(symmetrize(d), z) / denom


def extremal_two_point(z, p) -> DiscreteDistribution:
    """P(X = qz) = p, P(X = -pz) = q; the ratio tends to 4 as p → 1/2+."""
    z, p = parse_number(z), parse_number(p)
    q = 1 - p
    if not (0 < p < 1):
        raise ValueError("p must lie in (0, 1)")
    return DiscreteDistribution((q * z, -p * z), (p, q))


# ---------------------------------------------------------------------------
# characteristic function and exact Kolmogorov distance
# ---------------------------------------------------------------------------

class ConvolutionTooLarge(ValueError):
    """The exact distribution of S_n has too many atoms; sampling is out of scope."""


def chf(sys: SummandSystem, t):
    """E exp(i t S_n / B_n), exact product over summands."""
    t = np.asarray(t, dtype=float)
    B = float(sys.B)
    out = np.ones(t.shape, dtype=complex)
    for d, c in sys.blocks:
        xs = np.array([float(x) for x in d.xs]) / B
        ps = np.array([float(p) for p in d.ps])
        f = np.exp(1j * t[..., None] * xs).dot(ps)
        out = out * f ** c
    return complex(out) if out.ndim == 0 else out


def _merge_float(xs: np.ndarray, ps: np.ndarray, tol: float = MERGE_TOL):
    order = np.argsort(xs, kind="stable")
    xs, ps = xs[order], ps[order]
    if xs.size == 0:
        return xs, ps
    new = np.concatenate([[True], np.diff(xs) > tol])
    idx = np.cumsum(new) - 1
    merged_p = np.bincount(idx, weights=ps)
    return xs[new], merged_p


def _convolve(a, b, cap):
    (xa, pa), (xb, pb) = a, b
    if xa.size * xb.size > 64 * cap:
        raise ConvolutionTooLarge(
            f"exact convolution would need {xa.size * xb.size} raw atoms; "
            "use a smaller system (Monte-Carlo estimation is not supported)")
    xs, ps = _merge_float(np.add.outer(xa, xb).ravel(), np.outer(pa, pb).ravel())
    if xs.size > cap:
        raise ConvolutionTooLarge(
            f"exact convolution has {xs.size} atoms, above the cap {cap}; "
            "Monte-Carlo estimation is not supported")
    return xs, ps


def convolution(sys: SummandSystem, cap: int = DEFAULT_ATOM_CAP):
    """Atoms and masses of the unnormalized sum S_n (floats, merged at 1e-12)."""
    total = (np.zeros(1), np.ones(1))
    for d, c in sys.blocks:
        base = (np.array([float(x) for x in d.xs]), np.array([float(p) for p in d.ps]))
        # binary powering of the c-fold convolution
        while c:
            if c & 1:
                total = _convolve(total, base, cap)
            c >>= 1
            if c:
                base = _convolve(base, base, cap)
    return total


def kolmogorov_distance(sys: SummandSystem, cap: int = DEFAULT_ATOM_CAP) -> float:
    """sup_x |P(S_n < x B_n) - Φ(x)| evaluated at both one-sided limits of every jump."""
    xs, ps = convolution(sys, cap)
    phi = std_normal_cdf(xs / float(sys.B))
    after = np.minimum(np.cumsum(ps), 1.0)
    before = after - ps
    return float(max(np.max(np.abs(after - phi)), np.max(np.abs(before - phi))))


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoMoments:
    """Moment functions of the heavy-tailed density family p_θ, θ ∈ (0, 1)."""

    theta: float
    sigma2: float
    alpha3: float

    @property
    def ratio(self) -> float:
        return abs(self.alpha3) / self.sigma2


def _two_point(p=Fraction(4, 5), n: int = 1) -> SummandSystem:
    p = parse_number(p)
    if not (Fraction(1, 2) <= p < 1):
        raise ValueError("p must lie in [1/2, 1)")
    q = 1 - p
    return SummandSystem.iid(DiscreteDistribution((_sqrt(q / p), -_sqrt(p / q)), (p, q)), n)


def _three_point(n: int = 4) -> SummandSystem:
    d = DiscreteDistribution((Fraction(4, 5), -1, Fraction(7, 5)),
                             (Fraction(10, 27), Fraction(53, 108), Fraction(5, 36)))
    return SummandSystem.iid(d, n)


def _four_point(n: int = 9) -> SummandSystem:
    p, q = Fraction(800, 819), Fraction(19, 819)
    x1, x2 = Fraction(9, 10), Fraction(3)
    d = DiscreteDistribution((-x2, -x1, x1, x2), (q / 2, p / 2, p / 2, q / 2))
    return SummandSystem.iid(d, n)


def _alternating(n: int = 4) -> SummandSystem:
    if n < 2 or n % 2:
        raise ValueError("n must be a positive even integer")
    X = DiscreteDistribution((Fraction(1, 2), -1, 2), (Fraction(4, 9), Fraction(4, 9), Fraction(1, 9)))
    return SummandSystem(((X, n // 2), (X.negated(), n // 2)))


def _pareto(theta) -> ParetoMoments:
    th = float(theta)
    if not 0 < th < 1:
        raise ValueError("theta must lie in (0, 1)")
    s2 = 2 * (3 + th) * (7 + 5 * th) / ((1 + th) * (17 + 7 * th))
    # a/θ - b, integrated directly from the density
    a3 = 8 * (3 + th) * (1 - th) / (th * (17 + 7 * th))
    return ParetoMoments(th, s2, a3)


SCENARIOS = {
    "two_point_Fp": _two_point,
    "three_point": _three_point,
    "four_point_symmetric": _four_point,
    "alternating_three_point": _alternating,
    "pareto_theta": _pareto,
}


def scenario(name: str, **params):
    """Named extremal systems; ``pareto_theta`` returns moment formulas only."""
    try:
        factory = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# input documents
# ---------------------------------------------------------------------------

def _dist_from_obj(obj) -> tuple[DiscreteDistribution, int]:
    if isinstance(obj, dict):
        atoms = obj.get("atoms")
        repeat = obj.get("repeat", 1)
    else:
        atoms, repeat = obj, 1
    if not isinstance(atoms, list) or not atoms:
        raise ValueError("each summand needs a nonempty 'atoms' list of [x, p] pairs")
    pairs = []
    for a in atoms:
        if isinstance(a, dict):
            pairs.append((a["x"], a["p"]))
        elif isinstance(a, (list, tuple)) and len(a) == 2:
            pairs.append((a[0], a[1]))
        else:
            raise ValueError(f"bad atom {a!r}")
    if not isinstance(repeat, int) or isinstance(repeat, bool):
        raise ValueError("repeat must be an integer")
    return DiscreteDistribution.from_atoms(pairs), repeat


def _parse_text(text: str) -> list:
    # "x p" per line, '#' comments, "repeat k" lines, blank lines separate summands
    summands, current = [], {"atoms": [], "repeat": 1}
    for raw in text.splitlines() + [""]:
        line = raw.split("#", 1)[0].strip()
        if not line:
            if current["atoms"]:
                summands.append(current)
                current = {"atoms": [], "repeat": 1}
            continue
        parts = line.split()
        if parts[0].lower() == "repeat" and len(parts) == 2:
            current["repeat"] = int(parts[1])
        elif len(parts) == 2:
            current["atoms"].append(parts)
        else:
            raise ValueError(f"cannot parse line {raw!r}")
    return summands


def loads_system(text: str) -> SummandSystem:
    """Parse a JSON or plain-text distribution document.

    JSON: ``{"summands": [{"atoms": [[x, p], ...], "repeat": k}, ...]}``, a
    single ``{"atoms": ..., "repeat": k}`` object, or a bare atom list. Values
    may be numbers or strings such as ``"53/108"``.
    """
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        doc = json.loads(text)
        if isinstance(doc, dict) and "summands" in doc:
            items = doc["summands"]
        elif isinstance(doc, dict) or (isinstance(doc, list) and doc and isinstance(doc[0], (list, dict)) and not (isinstance(doc[0], dict) and "atoms" in doc[0])):
            items = [doc]
        else:
            items = doc
    else:
        items = _parse_text(text)
    if not items:
        raise ValueError("no summands found")
    return SummandSystem(tuple(_dist_from_obj(it) for it in items))


def load_system(path) -> SummandSystem:
    return loads_system(Path(path).read_text())
