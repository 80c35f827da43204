"""Command-line interface: verdicts, documents, exit codes, determinism."""

import json

import pytest

from bitableau.cli import main
from bitableau.kripke import KripkeModel, certify
from bitableau.formula import parse
from bitableau.saturation import logic_by_name


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSat:
    def test_unsat_text(self, capsys):
        code, out, _ = run_cli(capsys, "sat", "--logic", "kde", "<a>p & [a][b]~p")
        assert code == 0
        assert "result: unsat" in out

    def test_sat_json(self, capsys):
        code, out, _ = run_cli(capsys, "sat", "--logic", "kab",
                               "~([a][b]p -> [a]p)", "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["result"] == "sat"
        assert set(doc["stats"]) == {"nodes_visited", "ccs_enumerated",
                                     "max_stack_depth", "max_window_chain"}

    def test_model_subcommand_certifies(self, capsys):
        code, out, _ = run_cli(capsys, "model", "--logic", "kab",
                               "~([a][b]p -> [a]p)", "--json")
        assert code == 0
        doc = json.loads(out)
        model = KripkeModel.from_json(doc["model"])
        assert certify(model, parse(doc["formula"]), logic_by_name("kab"))

    def test_flags_select_logic(self, capsys):
        code, out, _ = run_cli(capsys, "sat", "--de", "--4a", "--4b",
                               "<a>q & [a][b]p", "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["logic"] == "kde4a4b" and doc["result"] == "sat"

    def test_default_logic_is_kab(self, capsys):
        code, out, _ = run_cli(capsys, "sat", "~([a][b]p -> [a]p)", "--json")
        assert json.loads(out)["logic"] == "kab"

    def test_stdin_input(self, capsys, monkeypatch):
        import io
        monkeypatch.setattr("sys.stdin", io.StringIO("p & ~p"))
        code, out, _ = run_cli(capsys, "sat", "--logic", "kde")
        assert code == 0 and "unsat" in out


class TestValid:
    def test_valid(self, capsys):
        code, out, _ = run_cli(capsys, "valid", "--logic", "kde",
                               "[a][b]p -> [a]p", "--json")
        assert code == 0
        assert json.loads(out)["result"] == "valid"

    def test_invalid_ships_countermodel(self, capsys):
        code, out, _ = run_cli(capsys, "valid", "--logic", "kab",
                               "[a][b]p -> [a]p", "--json")
        doc = json.loads(out)
        assert doc["result"] == "invalid"
        model = KripkeModel.from_json(doc["countermodel"])
        f = parse("~([a][b]p -> [a]p)")
        assert certify(model, f, logic_by_name("kab"))


class TestExitCodes:
    def test_parse_error(self, capsys):
        code, _, err = run_cli(capsys, "sat", "--logic", "kde", "p & & q")
        assert code == 2 and "parse error" in err

    def test_budget_exhausted(self, capsys):
        code, _, err = run_cli(capsys, "sat", "--logic", "kde", "<a><b>p",
                               "--budget-nodes", "1")
        assert code == 3 and "budget" in err

    def test_conflicting_logic_selection(self, capsys):
        with pytest.raises(SystemExit):
            run_cli(capsys, "sat", "--logic", "kde", "--4a", "p")


class TestBench:
    def test_file_run(self, capsys, tmp_path):
        path = tmp_path / "corpus.fml"
        path.write_text("# comment line\n<a>p\np & ~p\n\n[a][b]p -> [a]p\n")
        code, out, _ = run_cli(capsys, "bench", "--logic", "kde",
                               "--file", str(path), "--json")
        assert code == 0
        doc = json.loads(out)
        assert [r["result"] for r in doc["results"]] == ["sat", "unsat", "sat"]
        agg = doc["aggregate"]
        assert agg["formulas"] == 3 and agg["sat"] == 2 and agg["unsat"] == 1
        assert 0 <= agg["max_stack_depth_over_bound"] <= 1

    def test_parse_error_reports_line(self, capsys, tmp_path):
        path = tmp_path / "bad.fml"
        path.write_text("p\n)(\n")
        code, _, err = run_cli(capsys, "bench", "--logic", "kde", "--file", str(path))
        assert code == 2 and "line 2" in err


class TestDeterminismAndFormats:
    def test_identical_invocations_identical_documents(self, capsys):
        _, out1, _ = run_cli(capsys, "sat", "--logic", "kde4a",
                             "<a>(p & <b>q)", "--json")
        _, out2, _ = run_cli(capsys, "sat", "--logic", "kde4a",
                             "<a>(p & <b>q)", "--json")
        assert out1 == out2

    def test_text_and_json_verdicts_agree(self, capsys):
        for formula in ("<a>p", "p & ~p", "[a][b]p -> [a]p"):
            _, text_out, _ = run_cli(capsys, "sat", "--logic", "kde", formula)
            _, json_out, _ = run_cli(capsys, "sat", "--logic", "kde", formula, "--json")
            verdict = json.loads(json_out)["result"]
            assert f"result: {verdict}" in text_out


class TestSelftest:
    def test_quick_pass(self, capsys):
        code, out, _ = run_cli(capsys, "selftest", "--max-size", "3",
                               "--property-samples", "150")
        assert code == 0
        assert "selftest passed" in out
