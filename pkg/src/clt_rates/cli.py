"""Command-line front end.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage or
input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .chf import BoundContext, FractionKind
from .constants import GAMMA_STAR, KAPPA, T_INF, TAU1_BAR, X0, t_thresholds
from .fractions import (
    ConvolutionTooLarge,
    esseen_fraction,
    fraction_report,
    kolmogorov_distance,
    load_system,
    lyapunov_fraction,
    osipov_fraction,
    rozovskii_fraction,
    scenario,
    SCENARIOS,
)
from .solver import (
    L0_DEFAULT,
    L1_DEFAULT,
    absolute_constant,
    aex_upper,
    c0,
    c1,
    level_curve,
    small_L_limit,
)
from .tables import FAIL, PASS, format_param, parse_param, reproduce_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# constants used by the comparison report
_C_NEW = Fraction(273, 100)
_C_OSIPOV = Fraction(187, 100)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------

def _param(text: str) -> float:
    try:
        v = parse_param(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number, 'inf' or 'gamma_star': {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return v


def _L_range(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a:b") from None
    if not 0 < a < b:
        raise argparse.ArgumentTypeError("need 0 < a < b")
    return a, b


def _kind(text: str) -> FractionKind:
    try:
        return FractionKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@dataclass(frozen=True)
class RunConfig:
    command: str
    kind: FractionKind
    eps: float
    gamma: float
    L: float | None
    L_range: tuple[float, float]
    output_format: str
    tol_overrides: dict | None
    jobs: int


def _load_overrides(path):
    if path is None:
        return None
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read tolerance overrides: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("tolerance overrides must be a JSON object keyed by table id")
    return doc


def _config(args) -> RunConfig:
    kind = args.kind
    if kind is FractionKind.ROZOVSKII and math.isinf(args.eps):
        raise UsageError("the Rozovskii fraction needs a finite --eps")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return RunConfig(args.command, kind, args.eps, args.gamma, args.L, args.L_range, args.format,
                     _load_overrides(args.tol_overrides), args.jobs)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.10g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return _fmt(v)
    if isinstance(v, float) and not math.isfinite(v):
        return _fmt(v)
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(v.item())
    return v


def emit(rows: list[dict], fmt: str, out, *, meta: dict | None = None) -> None:
    """Write ``rows`` (list of flat dicts sharing keys) as an aligned table, CSV or JSON."""
    if fmt == "json":
        doc = {"rows": _jsonable(rows)} if meta is None else {**_jsonable(meta), "rows": _jsonable(rows)}
        json.dump(doc, out, indent=2, ensure_ascii=False)
        out.write("\n")
        return
    if not rows:
        return
    header = list(rows[0])
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\r\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r.get(k)) for k in header])
        return
    cells = [[_fmt(r.get(k)) for k in header] for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(header)]
    if meta:
        for k, v in meta.items():
            out.write(f"# {k}: {_fmt(v)}\n")
    out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for c in cells:
        out.write("  ".join(x.ljust(w) for x, w in zip(c, widths)).rstrip() + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_constants(cfg: RunConfig, args, out) -> int:
    rows = [
        {"name": "x0", "value": f"{X0:.10f}"},
        {"name": "kappa", "value": f"{KAPPA:.10f}"},
        {"name": "gamma_star", "value": f"{GAMMA_STAR:.10f}"},
        {"name": "t_inf", "value": f"{T_INF:.10f}"},
        {"name": "tau1_bar", "value": f"{TAU1_BAR:.10f}"},
    ]
    emit(rows, cfg.output_format, out)
    return EXIT_OK


def cmd_table(cfg: RunConfig, args, out) -> int:
    cells = reproduce_table(args.id, tol_overrides=cfg.tol_overrides, jobs=cfg.jobs)
    rows = [{"row": c.row, "column": c.column, "computed": c.computed, "expected": c.expected,
             "deviation": c.deviation, "tol": c.tol, "status": c.status} for c in cells]
    counts = {s: sum(c.status == s for c in cells) for s in ("PASS", "FLAG", "FAIL")}
    emit(rows, cfg.output_format, out, meta={"table": args.id, **counts})
    return EXIT_FAIL if counts["FAIL"] else EXIT_OK


def cmd_constant(cfg: RunConfig, args, out) -> int:
    L0, L1 = cfg.L_range
    value, rep = absolute_constant((cfg.kind, cfg.eps, cfg.gamma), L0=L0, L1=L1, tol=args.tol)
    small, large = rep.small, rep.large
    doc = {
        "kind": cfg.kind.value,
        "eps": cfg.eps,
        "gamma": cfg.gamma,
        "value": value,
        "value_rounded_up": rep.rounded(args.digits),
        "branch": rep.branch,
        "c_min": rep.c_min,
        "c0_branch": {"value": rep.c0_value, "L0": rep.L0, "tau0": small.params.tau0, "tau1": small.params.tau1,
                      "contributions": {"I1": small.I1, "I2": small.I2, "I3": small.I3, "I4": small.I4}},
        "c1_branch": {"value": rep.c1_value, "best_point_value": rep.c1_best, "L1": rep.L1,
                      "at_argmax": large.total},
        "argmax_L": rep.argmax_L,
        "optimal_params": dict(zip(("T0_L", "T1_L3"), large.params.scaled(large.L))),
        "contributions": {"I1": large.I1, "I2": large.I2, "I3": large.I3, "I4": large.I4},
    }
    if cfg.output_format == "json":
        json.dump(_jsonable(doc), out, indent=2)
        out.write("\n")
    else:
        flat = {k: v for k, v in doc.items() if not isinstance(v, dict)}
        flat.update({f"c0_{k}": v for k, v in doc["c0_branch"].items() if not isinstance(v, dict)})
        flat.update({f"c1_{k}": v for k, v in doc["c1_branch"].items()})
        flat.update(doc["optimal_params"])
        flat.update(doc["contributions"])
        if cfg.output_format == "csv":
            emit([flat], "csv", out)
        else:
            emit([{"field": k, "value": v} for k, v in flat.items()], "table", out)
    return EXIT_OK


def cmd_bound(cfg: RunConfig, args, out) -> int:
    """C(ε, γ, L) at a single L: closed form for L ≤ L₀, quadrature otherwise."""
    if cfg.L is None:
        raise UsageError("--L is required")
    L0 = min(cfg.L_range[0], small_L_limit(cfg.kind, cfg.eps))
    ctx = BoundContext(cfg.kind, cfg.eps, cfg.gamma, cfg.L)
    b = c0(ctx, L0=L0) if cfg.L <= L0 else c1(ctx)
    row = {"kind": cfg.kind.value, "eps": cfg.eps, "gamma": cfg.gamma, **b.as_dict()}
    emit([row], cfg.output_format, out)
    return EXIT_OK


def _system_rows(system, eps, gamma, delta, with_delta: bool, cap: int):
    rep = fraction_report(system, eps, gamma, delta)
    row = {"n": system.n, "B_n": float(system.B), **rep.as_dict()}
    if with_delta:
        try:
            row["kolmogorov_distance"] = kolmogorov_distance(system, cap)
        except ConvolutionTooLarge as exc:
            row["kolmogorov_distance"] = None
            row["note"] = str(exc)
    return row, rep


def cmd_fractions(cfg: RunConfig, args, out) -> int:
    try:
        system = load_system(args.file)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"invalid distribution file: {exc}") from None
    row, _ = _system_rows(system, cfg.eps, cfg.gamma, args.delta, args.exact_distance, args.atom_cap)
    emit([row], cfg.output_format, out)
    return EXIT_OK


def _scenario_system(args):
    params = {}
    if args.name in ("two_point_Fp",):
        params["p"] = Fraction(args.p) if args.p is not None else Fraction(4, 5)
    if args.name != "pareto_theta":
        params["n"] = args.n
    else:
        params["theta"] = args.theta
    return scenario(args.name, **params)


def cmd_compare(cfg: RunConfig, args, out) -> int:
    """Fractions of a named scenario and the checks that separate them."""
    try:
        system = _scenario_system(args)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    if args.name == "pareto_theta":
        row = {"theta": system.theta, "sigma2": system.sigma2, "alpha3": system.alpha3, "ratio": system.ratio}
        emit([row], cfg.output_format, out)
        return EXIT_OK
    eps = Fraction(cfg.eps).limit_denominator(10 ** 6) if math.isfinite(cfg.eps) else cfg.eps
    gamma = Fraction(cfg.gamma).limit_denominator(10 ** 6) if math.isfinite(cfg.gamma) else cfg.gamma
    E = esseen_fraction(system, eps, gamma)
    R = rozovskii_fraction(system, eps, gamma) if math.isfinite(cfg.eps) else None
    lyap = lyapunov_fraction(system)
    osi = osipov_fraction(system, 1)
    checks = []

    def check(name, lhs, rhs, ok):
        checks.append({"check": name, "lhs": lhs, "rhs": rhs, "status": PASS if ok else FAIL})

    if args.name in ("four_point_symmetric", "alternating_three_point") and R is not None:
        lhs, rhs = _C_NEW * max(E, R), _C_OSIPOV * osi
        check("2.73*max(L_E,L_R) < 1.87*(Lambda_n(1)+L_n(1))", lhs, rhs, lhs < rhs)
    if args.name == "three_point" and R is not None:
        check("L_R < L_E", R, E, R < E)
    if args.name == "two_point_Fp" and R is not None:
        check("L_R > L_3n", R, lyap, R > lyap)
    if math.isfinite(cfg.gamma) and cfg.gamma <= 1:
        check("L_E <= L_3n", E, lyap, E <= lyap * (1 + 1e-12))
    rows = [{"quantity": "esseen", "value": E}, {"quantity": "rozovskii", "value": R},
            {"quantity": "lyapunov", "value": lyap}, {"quantity": "osipov(1)", "value": osi}]
    if args.exact_distance:
        try:
            rows.append({"quantity": "kolmogorov_distance", "value": kolmogorov_distance(system, args.atom_cap)})
        except ConvolutionTooLarge as exc:
            rows.append({"quantity": "kolmogorov_distance", "value": None, "note": str(exc)})
    for r in rows:
        r.setdefault("note", "")
        v = r["value"]
        r["sqrt_n_times"] = None if v is None else float(v) * math.sqrt(system.n)
    emit(rows, cfg.output_format, out, meta={"scenario": args.name, "n": system.n})
    if cfg.output_format != "json":
        out.write("\n")
    emit(checks, cfg.output_format, out)
    return EXIT_FAIL if any(c["status"] == FAIL for c in checks) else EXIT_OK


def _figure_rows(fig: int, cfg: RunConfig, args):
    if fig == 1:
        for g in np.geomspace(0.01, 10.0, args.points):
            tg, t1, t2 = t_thresholds(float(g))
            yield {"gamma": float(g), "t_gamma": tg, "t1_gamma": t1, "t_inf": T_INF}
    elif fig == 2:
        grid = np.geomspace(0.6, 10.0, args.points)
        if args.panel in ("left", "both"):
            for p in level_curve("esseen", 1.72, grid, measure="aex"):
                yield {"panel": "left", "level": 1.72, "eps": p.eps, "gamma": p.gamma, "note": p.note}
        if args.panel in ("right", "both"):
            for p in level_curve("esseen", 2.65, grid, measure="c1_max", gamma_rtol=1e-2):
                yield {"panel": "right", "level": 2.65, "eps": p.eps, "gamma": p.gamma, "note": p.note}
    elif fig == 3:
        for label, g in (("gamma_star", GAMMA_STAR), ("0.4", 0.4), ("0.3", 0.3), ("0.2", 0.2)):
            for e in np.linspace(0.3, 6.0, args.points):
                yield {"gamma": label, "eps": float(e), "aex_rozovskii": aex_upper("rozovskii", float(e), g)}
    elif fig == 4:
        L0, L1 = cfg.L_range
        for label, (kind, e, g) in (("left", ("esseen", math.inf, math.inf)),
                                    ("right", ("rozovskii", 2.12, GAMMA_STAR))):
            for L in np.geomspace(L0, L1, args.points):
                b = c1(BoundContext(kind, e, g, float(L)))
                yield {"panel": label, "L": float(L), "C1": b.total}
    else:
        raise UsageError("figure id must be 1, 2, 3 or 4")


def cmd_figure(cfg: RunConfig, args, out) -> int:
    rows = list(_figure_rows(args.id, cfg, args))
    emit(rows, cfg.output_format, out)
    return EXIT_OK


COMMANDS = {
    "constants": cmd_constants,
    "table": cmd_table,
    "constant": cmd_constant,
    "bound": cmd_bound,
    "fractions": cmd_fractions,
    "compare": cmd_compare,
    "figure": cmd_figure,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", type=_kind, default=FractionKind.ESSEEN, help="esseen or rozovskii")
    common.add_argument("--eps", type=_param, default=math.inf, help="truncation level (number or inf)")
    common.add_argument("--gamma", type=_param, default=math.inf, help="balance parameter (number, inf, gamma_star)")
    common.add_argument("--L", type=float, default=None, help="fraction value for single-L evaluations")
    common.add_argument("--L-range", dest="L_range", type=_L_range, default=(L0_DEFAULT, L1_DEFAULT),
                        help="L0:L1 for the moderate-L sweep (default 0.03:0.65)")
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--tol-overrides", dest="tol_overrides", default=None,
                        help="JSON file of per-table tolerance overrides")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for table rows")

    p = _Parser(prog="clt-rates", description="Natural convergence-rate constants in the CLT.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("constants", parents=[common], help="universal constants")
    t = sub.add_parser("table", parents=[common], help="recompute a reference table")
    t.add_argument("id", type=int, choices=(1, 2, 3, 4, 5))
    c = sub.add_parser("constant", parents=[common], help="absolute constant C(eps, gamma)")
    c.add_argument("--tol", type=float, default=2e-3, help="certification gap for the L sweep")
    c.add_argument("--digits", type=int, default=2, help="decimals of the rounded-up value")
    sub.add_parser("bound", parents=[common], help="C(eps, gamma, L) at a single L")
    f = sub.add_parser("fractions", parents=[common], help="fractions of a distribution file")
    f.add_argument("file")
    f.add_argument("--delta", type=float, default=1.0)
    f.add_argument("--exact-distance", action="store_true", help="also compute the exact Kolmogorov distance")
    f.add_argument("--atom-cap", type=int, default=2_000_000)
    cp = sub.add_parser("compare", parents=[common], help="fraction comparison for a named scenario")
    cp.add_argument("name", choices=sorted(SCENARIOS))
    cp.add_argument("--n", type=int, default=9)
    cp.add_argument("--p", default=None, help="two-point mass, e.g. 11/20")
    cp.add_argument("--theta", type=float, default=0.5)
    cp.add_argument("--exact-distance", action="store_true")
    cp.add_argument("--atom-cap", type=int, default=2_000_000)
    fg = sub.add_parser("figure", parents=[common], help="data series behind a figure")
    fg.add_argument("id", type=int, choices=(1, 2, 3, 4))
    fg.add_argument("--points", type=int, default=41)
    fg.add_argument("--panel", choices=("left", "right", "both"), default="left",
                    help="figure 2 panel; the right panel is slow")
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        return COMMANDS[args.command](cfg, args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
