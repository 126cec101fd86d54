"""Recompute the reference tables and compare against the embedded golden data."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources

from .chf import BoundContext, FractionKind
from .constants import GAMMA_STAR, t_thresholds
from .solver import L1_DEFAULT, aex_upper, c0, c1_max

__all__ = [
    "Cell",
    "load_golden",
    "parse_param",
    "format_param",
    "status_for",
    "reproduce_table",
    "TABLE_IDS",
]

TABLE_IDS = (1, 2, 3, 4, 5)
PASS, FLAG, FAIL = "PASS", "FLAG", "FAIL"

# column name -> tolerance key in the golden file
_SMALL_COLUMNS = {
    "C0_0": "C0_0",
    "C0_L0001": "C0", "tau0_L0001": "params", "tau1_L0001": "params",
    "C0_L003": "C0", "tau0_L003": "params", "tau1_L003": "params",
}
_LARGE_COLUMNS = {
    "C1": "C1", "L_star": "L_star", "T0L": "params", "T1L3": "params",
    "I1": "contributions", "I2": "contributions", "I3": "contributions", "I4": "contributions",
}


@lru_cache(maxsize=1)
def _golden_text() -> str:
    return resources.files("clt_rates").joinpath("data/tables.json").read_text()


def load_golden() -> dict:
    """Fresh copy of the golden tables (safe to mutate)."""
    return json.loads(_golden_text())


def parse_param(value) -> float:
    """Numbers, "inf", "gamma_star" (or "γ*") and "0+"."""
    if isinstance(value, (int, float)):
        return float(value)
    s = str(value).strip().lower()
    if s in {"inf", "+inf", "infinity", "∞"}:
        return math.inf
    if s in {"gamma_star", "γ*", "g*"}:
        return GAMMA_STAR
    if s == "0+":
        return 0.0
    return float(s)


def format_param(value) -> str:
    if isinstance(value, str):
        return "γ*" if value == "gamma_star" else value
    return f"{value:g}"


def status_for(deviation: float, tol: float) -> str:
    """PASS within tol, FLAG within 2·tol, else FAIL."""
    dev = abs(deviation)
    if not math.isfinite(dev):
        return FAIL
    if dev <= tol:
        return PASS
    return FLAG if dev <= 2.0 * tol else FAIL


@dataclass(frozen=True)
class Cell:
    table: int
    row: str
    column: str
    computed: float
    expected: float
    tol: float
    status: str

    @property
    def deviation(self) -> float:
        return self.computed - self.expected

    def as_dict(self) -> dict:
        d = asdict(self)
        d["deviation"] = self.deviation
        return d


def _tolerances(entry: dict, overrides: dict | None, table_id: int) -> dict:
    tol = entry["tolerance"]
    tol = dict(tol) if isinstance(tol, dict) else {"value": tol}
    if overrides:
        for key, val in overrides.get(str(table_id), overrides.get(f"table{table_id}", {})).items():
            tol[key] = float(val)
    return tol


def _row_label(row: dict) -> str:
    return f"({format_param(row['eps'])}, {format_param(row['gamma'])})" if "eps" in row else format_param(row["gamma"])


def _make(table_id, label, column, computed, expected, tol) -> Cell:
    expected = float(expected)
    return Cell(table_id, label, column, float(computed), expected, tol, status_for(computed - expected, tol))


def _table1(entry, tol):
    cells = []
    for row in entry["rows"]:
        g = parse_param(row["gamma"])
        computed = 0.0 if g == 0.0 else t_thresholds(g)[0]
        cells.append(_make(1, _row_label(row), "t_gamma", computed, row["t_gamma"], tol["value"]))
    return cells


def _small_row(table_id: int, kind: str, row: dict, tol: dict) -> list[Cell]:
    eps, gamma = parse_param(row["eps"]), parse_param(row["gamma"])
    label = _row_label(row)
    cells = [_make(table_id, label, "C0_0", aex_upper(kind, eps, gamma), row["C0_0"], tol.get("C0_0", tol["C0"]))]
    for L, suffix in ((0.001, "L0001"), (0.03, "L003")):
        b = c0(BoundContext(kind, eps, gamma, L))
        cells.append(_make(table_id, label, f"C0_{suffix}", b.total, row[f"C0_{suffix}"], tol["C0"]))
        cells.append(_make(table_id, label, f"tau0_{suffix}", b.params.tau0, row[f"tau0_{suffix}"], tol["params"]))
        cells.append(_make(table_id, label, f"tau1_{suffix}", b.params.tau1, row[f"tau1_{suffix}"], tol["params"]))
    return cells


def _large_row(table_id: int, kind: str, row: dict, tol: dict, L0: float) -> list[Cell]:
    eps, gamma = parse_param(row["eps"]), parse_param(row["gamma"])
    label = _row_label(row)
    b = c1_max((kind, eps, gamma), L0, L1_DEFAULT)
    T0L, T1L3 = b.params.scaled(b.L)
    computed = {"C1": b.total, "L_star": b.L, "T0L": T0L, "T1L3": T1L3,
                "I1": b.I1, "I2": b.I2, "I3": b.I3, "I4": b.I4}
    return [_make(table_id, label, col, computed[col], row[col], tol[key]) for col, key in _LARGE_COLUMNS.items()]


def _run_row(args):
    table_id, kind, row, tol, L0 = args
    if table_id in (2, 3):
        return _small_row(table_id, kind, row, tol)
    return _large_row(table_id, kind, row, tol, L0)


def reproduce_table(table_id: int, *, rows=None, tol_overrides: dict | None = None, jobs: int = 1,
                    L0: float = 0.03) -> list[Cell]:
    """Recompute every cell of a table; ``rows`` optionally selects row indices."""
    if table_id not in TABLE_IDS:
        raise ValueError(f"table id must be one of {TABLE_IDS}")
    entry = load_golden()[f"table{table_id}"]
    tol = _tolerances(entry, tol_overrides, table_id)
    if table_id == 1:
        return _table1(entry, tol)
    kind = FractionKind.parse(entry["kind"]).value
    selected = entry["rows"] if rows is None else [entry["rows"][i] for i in rows]
    tasks = [(table_id, kind, row, tol, L0) for row in selected]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_row, tasks))
    else:
        chunks = [_run_row(t) for t in tasks]
    return [c for chunk in chunks for c in chunk]
