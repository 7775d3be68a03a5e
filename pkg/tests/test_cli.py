import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qsw import cli


def run(argv, env=None, capsys=None):
    code = cli.main(argv, env=env or {})
    out, err = capsys.readouterr()
    return code, out, err


def strict_json(text):
    def reject(token):
        raise ValueError(f"non-finite JSON token {token}")

    return json.loads(text, parse_constant=reject)


def csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestEval:
    def test_monic_coefficients(self, capsys):
        code, out, _ = run(["eval", "--family", "gsw-monic", "--p", "0.5", "--q", "0.5", "--n", "1"], capsys=capsys)
        doc = strict_json(out)
        assert code == 0
        assert doc["schema"] == 1 and doc["family"] == "gsw-monic"
        assert doc["coeffs"] == pytest.approx([-1.414214, 1.0], abs=1e-6)

    def test_dfunction_at_origin(self, capsys):
        code, out, _ = run(["eval", "--family", "dfunction", "--p", "0", "--q", "0.5", "--x", "0"], capsys=capsys)
        assert code == 0 and strict_json(out)["eval"]["value"] == 0.0

    def test_modified_degree_zero(self, capsys):
        code, out, _ = run(["eval", "--family", "modified", "--p", "0.5", "--q", "0.5", "--n", "0"], capsys=capsys)
        coeffs = strict_json(out)["coeffs"]
        assert len(coeffs) == 1
        assert coeffs[0] == pytest.approx(0.5 ** -0.25, rel=1e-14)

    def test_point_evaluation(self, capsys):
        code, out, _ = run(["eval", "--family", "gsw-orthonormal", "--n", "3", "--x", "2.5"], capsys=capsys)
        from qsw import gsw
        from qsw.qseries import QParams

        assert strict_json(out)["eval"]["value"] == pytest.approx(gsw.gsw_orthonormal(QParams(0.0, 0.5), 3)(2.5), rel=1e-14)

    def test_density(self, capsys):
        code, out, _ = run(["eval", "--family", "density", "--p", "0.3", "--q", "0.4", "--x", "1.7"], capsys=capsys)
        assert code == 0 and strict_json(out)["eval"]["value"] > 0


class TestChain:
    def test_diagonal_columns(self, capsys):
        code, out, _ = run(["chain", "--p", "0.5", "--q", "0.5", "--count", "5", "--format", "csv"], capsys=capsys)
        rows = csv_rows(out)
        assert code == 0
        assert rows[0] == ["n", "beta", "m", "M", "h"]
        assert len(rows) == 6
        for r in rows[1:]:
            assert float(r[1]) == pytest.approx(0.222222, abs=1e-6)
            assert float(r[3]) == pytest.approx(0.666667, abs=1e-6)

    def test_continued_fraction_report(self, capsys):
        code, out, _ = run(["chain", "--p", "0.3", "--q", "0.4", "--depth", "200"], capsys=capsys)
        cf = strict_json(out)["continued_fraction"]
        assert abs(cf["value"] - cf["closed_form"]) < 1e-7
        assert abs(cf["difference"]) < 1e-7


class TestMeasure:
    def test_report(self, capsys):
        code, out, _ = run(["measure", "--p", "0", "--q", "0.5", "--count", "30"], capsys=capsys)
        doc = strict_json(out)
        assert code == 0
        assert doc["hayman"]["b2"] == 0.0
        assert doc["moments"][0]["rel_error"] < 1e-5
        assert len(doc["atoms"]) == 30

    def test_range_exhaustion(self, capsys):
        code, _, err = run(["measure", "--count", "5000"], capsys=capsys)
        assert code == cli.EXIT_RANGE
        assert "range exhausted" in err


class TestVerify:
    def test_default_suite_passes(self, capsys):
        code, out, _ = run(["verify"], capsys=capsys)
        doc = strict_json(out)
        assert code == 0 and doc["passed"]
        assert (doc["p"], doc["q"]) == (0.3, 0.4)

    def test_injected_fault_fails(self, capsys):
        code, out, err = run(["verify", "--inject-fault", "--format", "csv"], capsys=capsys)
        assert code == cli.EXIT_VERIFY
        assert any(r[2] == "FAIL" for r in csv_rows(out)[1:])
        assert "observed" in err and "bound" in err

    def test_diagonal_adds_specialized_checks(self, capsys):
        _, out, _ = run(["verify", "--p", "0.5", "--q", "0.5"], capsys=capsys)
        names = {c["check"] for c in strict_json(out)["checks"]}
        assert "p=q reduction" in names


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["eval", "--family", "bogus", "--n", "1"],
            ["eval", "--family", "gsw-monic"],
            ["eval", "--family", "density", "--x", "-1"],
            ["chain", "--count", "0"],
            ["hankel", "--n", "-1"],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        assert run(argv, capsys=capsys)[0] == cli.EXIT_USAGE

    @pytest.mark.parametrize("p,q", [("1.0", "0.5"), ("-0.2", "0.5"), ("0.2", "0"), ("0.2", "1.5")])
    def test_parameter_intervals_named(self, p, q, capsys):
        code, _, err = run(["hankel", "--p", p, "--q", q], capsys=capsys)
        assert code == cli.EXIT_USAGE
        assert "0 <= p < 1" in err and "0 < q < 1" in err

    def test_short_flags_rejected(self, capsys):
        assert run(["hankel", "-n", "2"], capsys=capsys)[0] == cli.EXIT_USAGE

    def test_unknown_subcommand(self, capsys):
        assert run(["plot"], capsys=capsys)[0] == cli.EXIT_USAGE

    def test_bad_format_env(self, capsys):
        assert run(["hankel"], env={"QSW_FORMAT": "xml"}, capsys=capsys)[0] == cli.EXIT_USAGE

    def test_numeric_failure(self, capsys):
        code, _, err = run(["eval", "--family", "gsw-monic", "--q", "0.1", "--n", "2000"], capsys=capsys)
        assert code == cli.EXIT_NUMERIC
        assert "numerical failure" in err

    def test_exit_codes_distinct(self):
        codes = {cli.EXIT_OK, cli.EXIT_USAGE, cli.EXIT_RANGE, cli.EXIT_VERIFY, cli.EXIT_NUMERIC}
        assert len(codes) == 5


class TestEnvironment:
    def test_format_from_env(self, capsys):
        _, out, _ = run(["hankel", "--n", "1"], env={"QSW_FORMAT": "csv"}, capsys=capsys)
        assert out.startswith("n,D,sign,log10_D")

    def test_flag_beats_env(self, capsys):
        _, out, _ = run(["hankel", "--n", "1", "--format", "json"], env={"QSW_FORMAT": "csv"}, capsys=capsys)
        assert strict_json(out)["schema"] == 1

    def test_eps_from_env_and_flag(self):
        parser = cli.build_parser()
        ns = parser.parse_args(["hankel"])
        assert cli.make_config(ns, {"QSW_EPS": "1e-12"}).params.eps == 1e-12
        ns = parser.parse_args(["hankel", "--eps", "1e-10"])
        assert cli.make_config(ns, {"QSW_EPS": "1e-12"}).params.eps == 1e-10

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "h.json"
        code, out, _ = run(["hankel", "--n", "2", "--out", str(target)], capsys=capsys)
        assert code == 0 and out == ""
        assert strict_json(target.read_text())["determinants"][2]["n"] == 2


class TestFormats:
    def test_overflow_markers(self, capsys):
        _, out, _ = run(["hankel", "--q", "0.05", "--n", "40"], capsys=capsys)
        last = strict_json(out)["determinants"][-1]["D"]
        assert last["value"] == {"overflow": True, "sign": 1}
        assert last["sign"] == 1 and last["log10"] > 308

    @pytest.mark.parametrize(
        "argv,key,fields",
        [
            (["chain", "--p", "0.3", "--q", "0.4", "--count", "8"], "table", ["n", "beta", "m", "M", "h"]),
            (["measure", "--count", "12"], "atoms", ["n", "tau", "rho", "log10_rho"]),
        ],
    )
    def test_json_csv_agree(self, argv, key, fields, capsys):
        _, js, _ = run(argv, capsys=capsys)
        _, cs, _ = run(argv + ["--format", "csv"], capsys=capsys)
        doc = strict_json(js)[key]
        rows = csv_rows(cs)
        assert rows[0] == fields
        for entry, row in zip(doc, rows[1:]):
            for f, cell in zip(fields, row):
                assert float(cell) == entry[f]
                assert f"{float(cell):.15g}" == f"{entry[f]:.15g}"

    def test_hankel_json_csv_agree(self, capsys):
        argv = ["hankel", "--p", "0.3", "--q", "0.2", "--n", "30"]
        _, js, _ = run(argv, capsys=capsys)
        _, cs, _ = run(argv + ["--format", "csv"], capsys=capsys)
        doc = strict_json(js)["determinants"]
        for entry, row in zip(doc, csv_rows(cs)[1:]):
            D = entry["D"]
            assert row[2] == str(D["sign"])
            assert float(row[3]) == D["log10"]
            if isinstance(D["value"], dict):
                assert row[1] == "overflow"
            else:
                assert float(row[1]) == D["value"]

    def test_eval_json_csv_agree(self, capsys):
        argv = ["eval", "--family", "modified", "--p", "0.3", "--q", "0.4", "--n", "6", "--x", "3.0"]
        _, js, _ = run(argv, capsys=capsys)
        _, cs, _ = run(argv + ["--format", "csv"], capsys=capsys)
        doc = strict_json(js)
        rows = csv_rows(cs)
        assert rows[0] == ["quantity", "index", "value"]
        assert [float(r[2]) for r in rows[1:-1]] == doc["coeffs"]
        assert float(rows[-1][2]) == doc["eval"]["value"]

    def test_verify_json_csv_agree(self, capsys):
        _, js, _ = run(["verify", "--p", "0.0", "--q", "0.5"], capsys=capsys)
        _, cs, _ = run(["verify", "--p", "0.0", "--q", "0.5", "--format", "csv"], capsys=capsys)
        checks = strict_json(js)["checks"]
        rows = csv_rows(cs)
        assert rows[0] == ["module", "check", "status", "observed", "bound"]
        for c, r in zip(checks, rows[1:]):
            assert (c["module"], c["check"], c["status"]) == tuple(r[:3])
            assert float(r[3]) == c["observed"]

    def test_fifteen_significant_digits(self):
        assert cli.num(math.pi) == 3.14159265358979
        assert cli.num(float("inf")) == {"overflow": True, "sign": 1}

    def test_help_documents_headers(self, capsys):
        with pytest.raises(SystemExit):
            cli.build_parser().parse_args(["chain", "--help"])
        out = capsys.readouterr().out
        assert "n,beta,m,M,h" in out and "n,tau,rho,log10_rho" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qsw", "hankel", "--n", "1", "--format", "csv"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[2].startswith("1,16,")
