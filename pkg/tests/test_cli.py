import json
import math
import subprocess
import sys

import pytest

from hhverify import __version__
from hhverify.catalog import CATALOG
from hhverify.cli import dumps_json, run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestVerify:
    def test_square_json(self, capsys):
        code, out, err = call(capsys, "verify", "--f", "x^2", "--a", "0", "--b", "1", "--x", "0.5",
                              "--p", "2", "--q", "2", "--format", "json")
        assert code == 0 and err == ""
        d = json.loads(out)
        assert d["lhs"] == pytest.approx(1 / 6, abs=1e-10)
        assert d["bounds"]["thm6"] == 0.375
        assert d["tool_version"] == __version__
        for key in ("command", "function", "interval", "x", "params", "lhs", "bounds", "slacks", "hypotheses",
                    "lemma1_residual", "quadrature_error", "satisfied", "tool_version"):
            assert key in d
        assert set(d["hypotheses"]) == {"h1", "hp", "hq"}

    def test_byte_identical_reruns(self, capsys):
        argv = ("verify", "--f", "exp(x)*sin(x)", "--a", "0", "--b", "2", "--format", "json")
        _, first, _ = call(capsys, *argv)
        _, second, _ = call(capsys, *argv)
        assert first == second

    def test_reversed_interval(self, capsys):
        code, out, err = call(capsys, "verify", "--f", "x^2", "--a", "1", "--b", "0")
        assert code == 1 and out == ""
        assert "require a < b" in err

    def test_x_outside(self, capsys):
        code, out, err = call(capsys, "verify", "--f", "x", "--a", "0", "--b", "1", "--x", "2")
        assert code == 1 and out == "" and "x" in err

    def test_syntax_error_has_offset(self, capsys):
        code, out, err = call(capsys, "verify", "--f", "2*(x", "--a", "0", "--b", "1")
        assert code == 1 and out == "" and "offset 4" in err

    @pytest.mark.parametrize("argv", [["verify"], ["verify", "--f", "x"], ["bogus"], ["verify", "--f", "x", "--a", "0", "--b", "1", "--p", "1"]])
    def test_usage_errors_exit_1(self, capsys, argv):
        code, out, err = call(capsys, *argv)
        assert code == 1 and out == "" and err

    def test_uncertified_exit_2(self, capsys):
        code, out, err = call(capsys, "verify", "--f", "catalog:sin10", "--format", "json")
        assert code == 2
        d = json.loads(out)
        assert d["status"]["thm6"] == "hypothesis-not-certified"
        assert "hypothesis-not-certified" in err

    def test_catalog_default_interval(self, capsys):
        code, out, _ = call(capsys, "verify", "--f", "catalog:sqrtabs", "--format", "json")
        d = json.loads(out)
        assert code == 0 and d["interval"] == {"a": 0.25, "b": 4.0} and d["function"] == "catalog:sqrtabs"

    def test_text_format(self, capsys):
        code, out, _ = call(capsys, "verify", "--f", "x^2", "--a", "0", "--b", "1", "--format", "text")
        assert code == 0 and "thm6" in out and "outcome: ok" in out

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = call(capsys, "verify", "--f", "x", "--a", "0", "--b", "1", "--format", "json",
                            "--output", str(path))
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["function"] == "x"

    def test_unwritable_output(self, capsys, tmp_path):
        code, out, err = call(capsys, "verify", "--f", "x", "--a", "0", "--b", "1",
                              "--output", str(tmp_path / "missing" / "r.json"))
        assert code == 1 and out == "" and "cannot write" in err


class TestOtherCommands:
    def test_reduce(self, capsys):
        code, out, err = call(capsys, "reduce", "--f", "exp(x)", "--a", "0", "--b", "2", "--p", "3", "--q", "1.5",
                              "--format", "json")
        assert code == 0 and err == ""
        d = json.loads(out)
        assert d["passed"] and all(p["relative_difference"] <= 1e-12 for p in d["pairs"])

    def test_sweep_csv(self, capsys):
        code, out, _ = call(capsys, "sweep", "--f", "x^2", "--a", "0", "--b", "1", "--n", "11")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "x,lhs,rhs6,rhs7,rhs8,slack6,slack7,slack8" and len(lines) == 12
        assert float(lines[-1].split(",")[0]) == 1.0

    def test_sweep_json(self, capsys):
        code, out, _ = call(capsys, "sweep", "--f", "x", "--a", "0", "--b", "1", "--n", "3", "--format", "json")
        assert code == 0 and len(json.loads(out)["rows"]) == 3

    def test_optimize(self, capsys):
        code, out, _ = call(capsys, "optimize", "--f", "exp(x)", "--a", "0", "--b", "1", "--theorem", "thm6",
                            "--format", "json")
        d = json.loads(out)
        assert code == 0 and d["exploratory"] is True
        assert d["results"][0]["argmin"] == pytest.approx(0.551, abs=0.01)

    def test_fuzz(self, capsys):
        code, out, _ = call(capsys, "fuzz", "--trials", "10", "--seed", "3", "--format", "json")
        d = json.loads(out)
        assert code == 0 and d["trials"] == 10 and d["violations"] == 0
        assert d["slack_ratio_histogram"]["buckets"] == 20

    def test_fuzz_family(self, capsys):
        code, out, _ = call(capsys, "fuzz", "--trials", "5", "--family", "monotone-exp", "--format", "json")
        assert code == 0 and json.loads(out)["families"] == {"monotone-exp": 5}

    def test_catalog_lists_everything(self, capsys):
        code, out, _ = call(capsys, "catalog")
        assert code == 0
        for name, e in CATALOG.items():
            line = next(l for l in out.splitlines() if l.startswith(f"catalog:{name} "))
            assert ("FOIL" in line) == e.foil
        code, out, _ = call(capsys, "catalog", "--format", "json")
        d = json.loads(out)
        assert [f["id"] for f in d["functions"]] == [f"catalog:{n}" for n in CATALOG]

    def test_version(self, capsys):
        code, out, _ = call(capsys, "--version")
        assert code == 0 and __version__ in out


class TestJson:
    def test_seventeen_digits(self):
        assert dumps_json(0.1) == "0.10000000000000001"
        assert json.loads(dumps_json(1 / 3)) == 1 / 3
        assert dumps_json(2.0) == "2.0" and dumps_json(-0.0) == "-0.0" and dumps_json(1e300) == "1.0000000000000001e+300"
        assert dumps_json(2) == "2"

    def test_non_finite_is_null(self):
        assert dumps_json([math.inf, math.nan]) == "[null, null]"

    def test_structure(self):
        obj = {"b": [1, 2.5, True], "a": {"s": "q\"", "n": None}, "e": [], "d": {}}
        assert json.loads(dumps_json(obj)) == obj
        assert list(json.loads(dumps_json(obj))) == ["b", "a", "e", "d"]


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "hhverify.cli", "verify", "--f", "x^2", "--a", "1", "--b", "0"],
                       capture_output=True, text=True)
    assert r.returncode == 1 and r.stdout == "" and "require a < b" in r.stderr
