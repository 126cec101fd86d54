import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from clt_rates.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, emit, run


class TestConstants:
    def test_values(self):
        code, out = run(["constants", "--format", "json"])
        assert code == EXIT_OK
        vals = {r["name"]: r["value"] for r in json.loads(out)["rows"]}
        assert vals["x0"].startswith("5.487414")
        assert vals["gamma_star"].startswith("0.5599")
        assert vals["t_inf"].startswith("3.5717")
        assert len(vals["kappa"].split(".")[1]) == 10

    def test_deterministic(self):
        assert run(["constants"]) == run(["constants"])
        assert run(["figure", "3", "--points", "5", "--format", "csv"]) == run(["figure", "3", "--points", "5", "--format", "csv"])


class TestOutputFormats:
    ROWS = [{"a": 1.5, "b": "x,y"}, {"a": float("inf"), "b": None}]

    def test_csv(self):
        buf = io.StringIO()
        emit(self.ROWS, "csv", buf)
        text = buf.getvalue()
        assert text.startswith("a,b\r\n")
        assert list(csv.reader(io.StringIO(text))) == [["a", "b"], ["1.5", "x,y"], ["inf", ""]]

    def test_json_and_table(self):
        buf = io.StringIO()
        emit(self.ROWS, "json", buf, meta={"k": 1})
        doc = json.loads(buf.getvalue())
        assert list(doc) == ["k", "rows"] and doc["rows"][1]["a"] == "inf"
        buf = io.StringIO()
        emit(self.ROWS, "table", buf)
        assert buf.getvalue().splitlines()[0].split() == ["a", "b"]


class TestTableCommand:
    def test_table1(self):
        code, out = run(["table", "1", "--format", "csv"])
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 9 and {r["status"] for r in rows} == {"PASS"}

    def test_failing_tolerances_exit_1(self, tmp_path):
        path = tmp_path / "tol.json"
        path.write_text(json.dumps({"1": {"value": 1e-12}}))
        code, _ = run(["table", "1", "--tol-overrides", str(path)])
        assert code == EXIT_FAIL

    def test_bad_overrides_exit_2(self, tmp_path):
        path = tmp_path / "tol.json"
        path.write_text("not json")
        assert run(["table", "1", "--tol-overrides", str(path)])[0] == EXIT_USAGE


class TestBoundCommand:
    def test_small_and_large(self):
        code, out = run(["bound", "--L", "0.03", "--format", "json"])
        assert code == EXIT_OK
        row = json.loads(out)["rows"][0]
        assert abs(row["total"] - 2.27337) < 1e-3
        code, out = run(["bound", "--L", "0.48338", "--format", "json"])
        assert code == EXIT_OK and abs(json.loads(out)["rows"][0]["total"] - 2.64082) < 1e-2

    def test_needs_L(self):
        assert run(["bound"])[0] == EXIT_USAGE


class TestFractionsCommand:
    def test_json_file(self, tmp_path):
        path = tmp_path / "sys.json"
        path.write_text(json.dumps({"summands": [{"atoms": [["4/5", "10/27"], [-1, "53/108"], ["7/5", "5/36"]],
                                                  "repeat": 4}]}))
        code, out = run(["fractions", str(path), "--eps", "1", "--gamma", "1", "--exact-distance", "--format", "json"])
        assert code == EXIT_OK
        row = json.loads(out)["rows"][0]
        assert row["esseen"] == pytest.approx(643 / 1350)
        assert row["rozovskii"] == pytest.approx(0.44)
        assert 0 < row["kolmogorov_distance"] < 2.74 * row["esseen"]

    def test_invalid_files(self, tmp_path):
        empty = tmp_path / "empty.txt"
        empty.write_text("")
        assert run(["fractions", str(empty)])[0] == EXIT_USAGE
        assert run(["fractions", str(tmp_path / "missing.json")])[0] == EXIT_USAGE
        bad = tmp_path / "bad.txt"
        bad.write_text("1 0.5\n2 0.5\n")  # nonzero mean
        assert run(["fractions", str(bad)])[0] == EXIT_USAGE


class TestCompareCommand:
    def test_four_point(self):
        code, out = run(["compare", "four_point_symmetric", "--n", "9", "--eps", "1", "--gamma", "1", "--format", "json"])
        assert code == EXIT_OK
        docs = out.strip().split("\n}\n")
        checks = json.loads(docs[1])["rows"]
        (c,) = [c for c in checks if c["check"].startswith("2.73")]
        assert c["status"] == "PASS"
        # √n-scaled values 0.9 and 87/65 at n = 9
        assert Fraction(c["lhs"]) == Fraction(273, 100) * Fraction(3, 10)
        assert Fraction(c["rhs"]) == Fraction(187, 100) * Fraction(87, 195)

    def test_two_point(self):
        code, out = run(["compare", "two_point_Fp", "--p", "11/20", "--n", "16", "--eps", "1", "--gamma", "1"])
        assert code == EXIT_OK and "L_R > L_3n" in out

    def test_pareto(self):
        code, out = run(["compare", "pareto_theta", "--theta", "0.001", "--format", "json"])
        assert code == EXIT_OK
        assert json.loads(out)["rows"][0]["ratio"] > 500

    def test_usage_errors(self):
        assert run(["compare", "alternating_three_point", "--n", "5", "--eps", "1", "--gamma", "1"])[0] == EXIT_USAGE
        assert run(["compare", "nope"])[0] == EXIT_USAGE


class TestUsage:
    @pytest.mark.parametrize("argv", [
        [], ["table", "7"], ["constants", "--eps", "abc"], ["constants", "--kind", "lyapunov"],
        ["constant", "--kind", "rozovskii"], ["figure", "2", "--L-range", "0.5"], ["constants", "--jobs", "0"],
    ])
    def test_exit_2(self, argv):
        assert run(argv)[0] == EXIT_USAGE

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "clt_rates", "constants", "--format", "csv"],
                              capture_output=True, check=False)
        assert proc.returncode == 0 and proc.stdout.startswith(b"name,value\r\n")


class TestFigures:
    def test_fig1_ordering(self):
        code, out = run(["figure", "1", "--points", "15", "--format", "json"])
        rows = json.loads(out)["rows"]
        assert code == EXIT_OK and all(r["t_gamma"] <= r["t1_gamma"] + 1e-12 for r in rows)

    def test_fig3_minimum(self):
        code, out = run(["figure", "3", "--points", "58", "--format", "json"])
        rows = [r for r in json.loads(out)["rows"] if r["gamma"] == "gamma_star"]
        best = min(rows, key=lambda r: r["aex_rozovskii"])
        assert best["aex_rozovskii"] <= 1.75 and abs(best["eps"] - 1.89) < 0.15

    def test_fig2_left(self):
        code, out = run(["figure", "2", "--points", "3", "--format", "json"])
        rows = json.loads(out)["rows"]
        assert code == EXIT_OK and len(rows) == 3 and rows[-1]["gamma"] is not None
