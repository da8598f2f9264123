import json
from pathlib import Path

import pytest

from gridfill.cli import main
from gridfill.report import RunReport
from conftest import TOYS

T1_JSON = """
{"variables": [{"name": "v1", "domain": ["a", "b"]},
               {"name": "v2", "domain": ["a", "b"]}],
 "unary_costs": [{"var": "v1", "costs": {"a": 1, "b": 0}, "default": 0},
                 {"var": "v2", "costs": {"a": 0, "b": 3}, "default": 0}],
 "constraints": [{"scope": ["v1", "v2"], "allowed": [["a", "a"], ["b", "b"]]}]}
"""

UNSAT_JSON = """
{"variables": [{"name": "x", "domain": ["r", "g"]},
               {"name": "y", "domain": ["r", "g"]},
               {"name": "z", "domain": ["r", "g"]}],
 "constraints": [{"scope": ["x", "y"], "allowed": [["r", "g"], ["g", "r"]]},
                 {"scope": ["y", "z"], "allowed": [["r", "g"], ["g", "r"]]},
                 {"scope": ["x", "z"], "allowed": [["r", "g"], ["g", "r"]]}]}
"""


@pytest.fixture
def t1_file(tmp_path):
    path = tmp_path / "t1.json"
    path.write_text(T1_JSON)
    return str(path)


@pytest.fixture
def unsat_file(tmp_path):
    path = tmp_path / "unsat.json"
    path.write_text(UNSAT_JSON)
    return str(path)


def toy_args(name):
    return [
        str(TOYS / f"{name}.xw"),
        "--dict", str(TOYS / "dictionary.tsv"),
        "--clues", str(TOYS / "clues.tsv"),
        "--scorer-config", str(TOYS / "scorer.json"),
    ]


class TestSolveWcsp:
    def test_bnb_reports_optimum(self, t1_file, capsys):
        code = main(["solve-wcsp", t1_file, "--algo", "bnb"])
        out = capsys.readouterr().out
        assert code == 0
        assert "v1 = a" in out and "v2 = a" in out
        assert "cost = 1.0" in out

    def test_unsat_exit_code(self, unsat_file, capsys):
        assert main(["solve-wcsp", unsat_file, "--algo", "bnb"]) == 2

    def test_lds_zero_discrepancies(self, t1_file, capsys):
        code = main(["solve-wcsp", t1_file, "--algo", "lds", "--max-disc", "0", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["stats"]["discrepancies_used"] == 0
        assert report["stats"]["algorithm"] == "lds"

    def test_parse_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"variables": [], "quux": 1}')
        assert main(["solve-wcsp", str(bad)]) == 1

    def test_report_round_trips(self, t1_file, capsys):
        main(["solve-wcsp", t1_file, "--json"])
        data = json.loads(capsys.readouterr().out)
        report = RunReport.from_json(data)
        assert report.to_json() == data


class TestSolveXw:
    def test_toy_solves_perfectly(self, capsys):
        code = main(["solve-xw", *toy_args("toy5"), "--algo", "lds-post", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["words_correct"] == 10
        assert report["solution"].splitlines()[0] == "SATOR"

    def test_empty_clue_db_still_legal(self, tmp_path, capsys):
        empty = tmp_path / "empty.tsv"
        empty.write_text("")
        args = toy_args("toy5")
        args[args.index("--clues") + 1] = str(empty)
        code = main(["solve-xw", *args, "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        rows = report["solution"].splitlines()
        # Crossings still agree even if the fill is wrong.
        for r in range(5):
            for c in range(5):
                assert rows[r][c].isalpha()

    def test_acpt_points_with_limit(self, capsys):
        code = main(["solve-xw", *toy_args("toy5"), "--limit-minutes", "15", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        # Perfect 10-word grid solved in well under a minute: 14 full minutes
        # remain, so 100 + 25*14 + 150.
        assert report["acpt_points"] == 10 * 10 + 25 * 14 + 150
        assert report["letters_correct"] == 25

    def test_trace_plot_written(self, tmp_path, capsys):
        png = tmp_path / "trace.png"
        code = main(["solve-xw", *toy_args("toy5"), "--trace-plot", str(png)])
        assert code == 0
        assert png.exists() and png.stat().st_size > 0


class TestValidate:
    def test_toy_validates_clean(self, capsys):
        assert main(["validate", str(TOYS / "toy7.xw")]) == 0
        assert "ok" in capsys.readouterr().out

    def test_broken_grid_reported(self, tmp_path, capsys):
        bad = tmp_path / "bad.xw"
        bad.write_text(
            "GRID\n...\n.#.\n...\nACROSS\n1 top\n3 bottom\nDOWN\n1 left\n2 right\n"
        )
        assert main(["validate", str(bad), "--json"]) == 2
        rows = json.loads(capsys.readouterr().out)
        assert any(v["kind"] == "coverage" for v in rows)


class TestFirstMistake:
    def test_damage_mode_full_depth(self, capsys):
        code = main(["first-mistake", *toy_args("toy5"), "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["first_mistake_depth"] == 10

    def test_local_mode_fails_on_trap(self, capsys):
        code = main(["first-mistake", *toy_args("toy5"), "--value-order", "local", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["first_mistake_depth"] == 0

    def test_missing_key_is_usage_error(self, tmp_path):
        nokey = tmp_path / "nokey.xw"
        # toy5 without its SOLUTION section
        text = (TOYS / "toy5.xw").read_text()
        nokey.write_text(text.split("SOLUTION")[0])
        args = toy_args("toy5")
        args[0] = str(nokey)
        assert main(["first-mistake", *args]) == 1


class TestBench:
    def test_table_and_artifacts(self, t1_file, unsat_file, tmp_path, capsys):
        out_dir = tmp_path / "bench"
        code = main([
            "bench", t1_file, unsat_file,
            "--algos", "bnb,lds-post,andor", "--max-disc", "2",
            "--out-dir", str(out_dir),
        ])
        assert code == 0
        table = capsys.readouterr().out
        assert "instance" in table and "bnb" in table
        assert (out_dir / "bench.json").exists()
        assert (out_dir / "bench.tsv").exists()
        assert (out_dir / "t1.png").exists()
        records = json.loads((out_dir / "bench.json").read_text())
        costs = {
            (r["instance"], r["algorithm"]): r["cost"]
            for r in records
            if "algorithm" in r
        }
        assert costs[("t1", "bnb")] == costs[("t1", "lds_post")] == 1.0
        assert costs[("unsat", "bnb")] is None
        tsv = (out_dir / "bench.tsv").read_text().splitlines()
        assert tsv[0].split("\t")[0] == "instance"
        assert len(tsv) == 1 + len(records)

    def test_empty_algos_usage_error(self, t1_file):
        assert main(["bench", t1_file, "--algos", ""]) == 1

    def test_bad_instance_reported_run_continues(self, t1_file, tmp_path, capsys):
        broken = tmp_path / "broken.json"
        broken.write_text("{nope")
        code = main(["bench", str(broken), t1_file, "--algos", "bnb", "--json"])
        assert code == 0
        records = json.loads(capsys.readouterr().out)
        assert any("error" in r for r in records)
        assert any(r.get("cost") == 1.0 for r in records)


class TestDeterminism:
    def test_same_flags_same_output(self, t1_file, capsys):
        main(["solve-wcsp", t1_file, "--algo", "lds-post", "--iterative", "--json"])
        first = json.loads(capsys.readouterr().out)
        main(["solve-wcsp", t1_file, "--algo", "lds-post", "--iterative", "--json"])
        second = json.loads(capsys.readouterr().out)
        first["stats"].pop("wall_ms")
        second["stats"].pop("wall_ms")
        assert first == second
