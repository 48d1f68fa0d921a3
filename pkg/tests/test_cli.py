import json

import pytest

from qonf.cli import main
from qonf.qdiff import system_to_json
from qonf.rings import series_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestNd:
    def test_csv_rows(self, capsys):
        code, out = run(capsys, "nd", "--dmax", "4")
        assert code == 0
        assert out.splitlines() == ["d,N_d", "1,1", "2,1", "3,12", "4,620"]

    def test_single_row(self, capsys):
        code, out = run(capsys, "nd", "--dmax", "1")
        assert code == 0
        assert out.splitlines()[1] == "1,1"

    def test_json_string_integers(self, capsys):
        code, out = run(capsys, "nd", "--dmax", "8", "--format", "json")
        doc = json.loads(out)
        assert doc["N_d"][-1] == "13525751027392"

    def test_usage_error(self, capsys):
        assert main(["nd", "--dmax", "0"]) == 2


class TestSpecialFunctionCommands:
    def test_theta(self, capsys):
        code, out = run(capsys, "theta", "--q", "0.3", "--Q", "1.0")
        doc = json.loads(out)
        assert code == 0
        assert doc["value"][0] == pytest.approx(2.6554698385, abs=1e-9)
        assert doc["triple_product_residual"] < 1e-10

    def test_qchar_shift_residual(self, capsys):
        code, out = run(capsys, "qchar", "--q", "0.5", "--lam", "0.8+0.3j", "--Q", "0.7")
        doc = json.loads(out)
        assert code == 0
        assert doc["shift_law_residual"] < 1e-10

    def test_qlog(self, capsys):
        code, out = run(capsys, "qlog", "--q", "0.5", "--Q", "0.7+0.2j")
        assert code == 0
        assert json.loads(out)["shift_law_residual"] < 1e-10

    def test_qhg(self, capsys):
        code, out = run(capsys, "qhg", "--upper", "0", "--q", "0.5", "--D", "3",
                        "--at", "0.2")
        doc = json.loads(out)
        assert code == 0
        assert doc["coefficients"][1][0] == pytest.approx(1 / (1 - 0.5))


class TestSystems:
    def test_solve_builtin(self, capsys):
        code, out = run(capsys, "solve", "--builtin", "pochhammer-scaled", "--D", "16")
        doc = json.loads(out)
        assert code == 0
        assert doc["kind"] == "unipotent"
        assert doc["shift_residual"] < 1e-8

    def test_confluence_builtins(self, capsys):
        expected = {
            "pochhammer-raw": False,
            "pochhammer-scaled": True,
            "irregular-limit": False,
        }
        for name, want in expected.items():
            code, out = run(capsys, "confluence", "--builtin", name)
            assert code == 0
            assert json.loads(out)["confluent"] is want

    def test_confluence_pn_j(self, capsys):
        code, out = run(capsys, "confluence", "--builtin", "pn-j", "--N", "3", "--z", "1")
        doc = json.loads(out)
        assert doc["confluent"] is True
        entries = {(e["i"], e["j"]): e["entry"] for e in doc["limit_system"]["entries"]}
        assert entries[(3, 0)] == "Q"

    def test_confluence_from_file(self, tmp_path, capsys):
        from qonf.confluence import builtin_system

        doc = system_to_json(builtin_system("pochhammer-scaled"))
        path = tmp_path / "sys.json"
        path.write_text(json.dumps(doc))
        code, out = run(capsys, "confluence", "--file", str(path))
        assert code == 0
        assert json.loads(out)["confluent"] is True

    def test_malformed_json_is_usage_error(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["confluence", "--file", str(path)]) == 2

    def test_birkhoff(self, capsys):
        code, out = run(capsys, "birkhoff", "--q", "0.55", "--Q", "0.7+1.1j")
        doc = json.loads(out)
        assert code == 0
        assert doc["q_constancy_residual"] < 1e-8


class TestJfn:
    def test_kth_table_contains_reference_coefficient(self, capsys):
        code, out = run(capsys, "jfn", "--kind", "kth", "--N", "2", "--D", "1")
        doc = json.loads(out)
        entry = next(r for r in doc["coeffs"] if (r["d"], r["i"]) == (1, 1))
        assert entry["coefficient"] == "(-3*q)/(1 - 4*q + 6*q^2 - 4*q^3 + q^4)"

    def test_coh_table(self, capsys):
        code, out = run(capsys, "jfn", "--kind", "coh", "--N", "2", "--D", "1")
        doc = json.loads(out)
        entry = next(r for r in doc["coeffs"] if (r["d"], r["i"]) == (1, 1))
        assert entry["coefficient"] == "-3"
        assert entry["z_exponent"] == -4

    def test_rank_one_column(self, capsys):
        code, out = run(capsys, "jfn", "--kind", "kth", "--N", "0", "--D", "3")
        doc = json.loads(out)
        assert doc["coeffs"][1]["coefficient"] == "(-1)/(-1 + q)"

    def test_modified_round_trips(self, capsys):
        code, out = run(capsys, "jfn", "--kind", "kth-modified", "--N", "1", "--D", "2")
        doc = json.loads(out)
        from qonf.gw import jk_modified

        back = series_from_json(doc)
        assert back == jk_modified(1, 2)

    def test_equivariant_resonant_exits_1(self, capsys):
        assert main(["jfn", "--kind", "equivariant", "--N", "1", "--D", "2",
                     "--lambdas", "0,1"]) == 1


class TestClassicalCommands:
    def test_potential(self, capsys):
        code, out = run(capsys, "potential", "--order", "2")
        doc = json.loads(out)
        assert code == 0
        rows = {(r["t0"], r["t1"], r["E"], r["t2"]): r["coefficient"]
                for r in doc["monomials"]}
        assert rows[(1, 2, 0, 0)] == "1/2"
        assert rows[(0, 0, 2, 5)] == "1/120"

    def test_wdvv_zero(self, capsys):
        code, out = run(capsys, "wdvv", "--order", "3")
        doc = json.loads(out)
        assert code == 0
        assert doc["identically_zero"] is True

    def test_wdvv_perturbed(self, capsys):
        code, out = run(capsys, "wdvv", "--order", "3", "--perturb", "2=2")
        doc = json.loads(out)
        assert code == 0
        assert doc["identically_zero"] is False
        assert doc["first_nonzero_E_degree"] == 2

    def test_wdvv_bad_perturb_flag(self, capsys):
        assert main(["wdvv", "--order", "3", "--perturb", "nonsense"]) == 2


class TestCompareAndVerify:
    def test_compare_matches(self, capsys):
        code, out = run(capsys, "compare", "--N", "1", "--D", "3")
        doc = json.loads(out)
        assert code == 0
        assert doc["exact_match"] is True

    def test_compare_table(self, capsys):
        code, out = run(capsys, "compare", "--N", "2", "--D", "2", "--table")
        doc = json.loads(out)
        assert "p2_correspondence_table" in doc

    def test_verify_suite(self, capsys):
        code, out = run(capsys, "verify", "--suite", "gw-equivariant", "--seed", "0")
        assert code == 0
        assert "OK" in out

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "nd.csv"
        code, _ = run(capsys, "nd", "--dmax", "2", "--output", str(path))
        assert code == 0
        assert path.read_text().splitlines()[2] == "2,1"
