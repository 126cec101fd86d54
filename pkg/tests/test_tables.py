import math

import pytest

from clt_rates.constants import GAMMA_STAR
from clt_rates.tables import (
    FAIL,
    FLAG,
    PASS,
    Cell,
    format_param,
    load_golden,
    parse_param,
    reproduce_table,
    status_for,
)


class TestGoldenData:
    def test_shape(self):
        g = load_golden()
        assert [len(g[f"table{i}"]["rows"]) for i in range(1, 6)] == [9, 22, 16, 23, 10]
        assert g["table2"]["kind"] == "esseen" and g["table5"]["kind"] == "rozovskii"

    def test_fresh_copies(self):
        g = load_golden()
        g["table1"]["rows"].clear()
        assert load_golden()["table1"]["rows"]

    def test_params(self):
        assert parse_param("inf") == math.inf
        assert parse_param("gamma_star") == GAMMA_STAR
        assert parse_param("0+") == 0.0
        assert parse_param(2.12) == 2.12
        assert format_param("gamma_star") == "γ*"
        assert format_param(0.5) == "0.5"


class TestStatus:
    def test_bands(self):
        assert status_for(1e-4, 1e-4) == PASS
        assert status_for(-1.5e-4, 1e-4) == FLAG
        assert status_for(2.5e-4, 1e-4) == FAIL
        assert status_for(math.nan, 1.0) == FAIL

    def test_cell(self):
        c = Cell(1, "1", "t_gamma", 2.0936, 2.0935, 1e-4, PASS)
        assert c.deviation == pytest.approx(1e-4)
        assert c.as_dict()["deviation"] == pytest.approx(1e-4)


class TestReproduction:
    def test_table1(self):
        cells = reproduce_table(1)
        assert len(cells) == 9 and all(c.status == PASS for c in cells)
        (one,) = [c for c in cells if c.row == "1"]
        assert abs(one.computed - 2.0935) < 1e-4

    def test_table3_row(self):
        g = load_golden()["table3"]["rows"]
        idx = next(i for i, r in enumerate(g) if r["eps"] == 1.21 and r["gamma"] == 0.2)
        cells = reproduce_table(3, rows=[idx])
        assert all(c.status == PASS for c in cells)
        (c,) = [c for c in cells if c.column == "C0_0"]
        assert abs(c.computed - 1.93474) < 1e-4

    def test_table4_row(self):
        g = load_golden()["table4"]["rows"]
        idx = next(i for i, r in enumerate(g) if r["eps"] == "inf" and r["gamma"] == "inf")
        cells = reproduce_table(4, rows=[idx])
        assert len(cells) == 8 and all(c.status == PASS for c in cells)
        (c,) = [c for c in cells if c.column == "C1"]
        assert abs(c.computed - 2.64082) < 5e-3

    def test_overrides(self):
        cells = reproduce_table(1, tol_overrides={"1": {"value": 1e-12}})
        assert any(c.status != PASS for c in cells)
        assert all(c.tol == 1e-12 for c in cells)

    def test_bad_id(self):
        with pytest.raises(ValueError):
            reproduce_table(6)
