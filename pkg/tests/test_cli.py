"""CLI subcommands, exit codes, deterministic report rendering."""

import json

import pytest

from schemafit.cli import build_parser, dumps_report, main
from schemafit.ingest import load_table


@pytest.fixture
def dataset(tmp_path):
    spec = {
        "years": 3,
        "rows_per_year": 150,
        "seed": 0,
        "columns": [
            {"name": "age", "family": "normal", "params": [30, 4]},
            {"name": "rooms", "family": "poisson", "params": [6]},
            {"name": "score", "family": "uniform", "params": [0, 100]},
        ],
        "mutations": [
            {"year": 2, "op": "rename", "column": "age", "new_name": "idade"},
            {"year": 3, "op": "remove", "column": "rooms"},
        ],
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec), encoding="utf-8")
    out = tmp_path / "ds"
    assert main(["gen", "--spec", str(spec_path), "--seed", "5", "--out", str(out)]) == 0
    return out


class TestDumpsReport:
    def test_seventeen_significant_digits(self):
        assert dumps_report({"x": 0.1}) == '{"x":0.10000000000000001}'
        assert dumps_report({"x": 1.0}) == '{"x":1}'
        assert dumps_report([None, True, False, 3]) == "[null,true,false,3]"

    def test_round_trip_exact(self):
        values = [0.049485876755377876, 5 / 6, 1e-300, 123456.789]
        again = json.loads(dumps_report(values))
        assert again == values

    def test_key_order_preserved(self):
        assert dumps_report({"b": 1, "a": 2}) == '{"b":1,"a":2}'


class TestMatch:
    def test_identity_pairs(self, dataset, tmp_path, capsys):
        base = dataset / "data" / "2001.csv"
        out = tmp_path / "rep.json"
        code = main(
            ["match", "--base", str(base), "--new", str(base), "--out", str(out)]
        )
        assert code == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert set(report) == {"config", "pairs", "candidates", "classification", "unscored"}
        for pair in report["pairs"]:
            assert pair["base"] == pair["new"]
            assert pair["p_value"] == 1.0
        assert report["classification"]["changed"] == 0
        names = [c.name for c in load_table(base).columns]
        assert [p["base"] for p in report["pairs"]] == names

    def test_missing_file_exit_2(self, dataset, capsys):
        code = main(["match", "--base", "no-such.csv", "--new", "no-such.csv"])
        assert code == 2

    def test_malformed_csv_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1\n", encoding="utf-8")
        assert main(["match", "--base", str(bad), "--new", str(bad)]) == 1

    def test_byte_identical_reports(self, dataset, tmp_path):
        base = dataset / "data" / "2001.csv"
        new = dataset / "data" / "2002.csv"
        outs = [tmp_path / "r1.json", tmp_path / "r2.json"]
        for out in outs:
            assert (
                main(["match", "--base", str(base), "--new", str(new), "--out", str(out)])
                == 0
            )
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_stdout_when_no_out_flag(self, dataset, capsys):
        base = dataset / "data" / "2001.csv"
        assert main(["match", "--base", str(base), "--new", str(base)]) == 0
        printed = capsys.readouterr().out
        assert json.loads(printed)["classification"]["changed"] == 0

    def test_candidate_lists_capped_at_top_k(self, dataset, tmp_path):
        base = dataset / "data" / "2001.csv"
        out = tmp_path / "rep.json"
        main(
            ["match", "--base", str(base), "--new", str(base), "--top-k", "2", "--out", str(out)]
        )
        report = json.loads(out.read_text(encoding="utf-8"))
        for cands in report["candidates"].values():
            assert len(cands) <= 2
            assert [c["rank"] for c in cands] == list(range(1, len(cands) + 1))


class TestEval:
    def test_yearly_table(self, dataset, capsys):
        code = main(
            [
                "eval",
                "--data-dir",
                str(dataset / "data"),
                "--gt-dir",
                str(dataset / "gt"),
                "--mode",
                "yearly",
                "--tests",
                "ks,ad",
                "--p-thresh",
                "0.05",
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("year")
        assert lines[2].split()[0] == "2001" and lines[2].split()[1] == "-"
        assert "[1]c [0]+ [0]-" in lines[3]
        assert len(lines) == 2 + 3  # header, rule, one row per release

    def test_accumulated_mode_runs(self, dataset, capsys):
        code = main(
            [
                "eval",
                "--data-dir",
                str(dataset / "data"),
                "--gt-dir",
                str(dataset / "gt"),
                "--mode",
                "accumulated",
                "--p-thresh",
                "0.05",
            ]
        )
        assert code == 0

    def test_json_rows_out(self, dataset, tmp_path, capsys):
        out = tmp_path / "rows.json"
        main(
            [
                "eval",
                "--data-dir",
                str(dataset / "data"),
                "--gt-dir",
                str(dataset / "gt"),
                "--out",
                str(out),
            ]
        )
        rows = json.loads(out.read_text(encoding="utf-8"))
        assert rows[0]["changes"] is None
        assert rows[1]["changes"] == {"changed": 1, "added": 0, "removed": 0}
        assert "ks" in rows[1]["top1"]

    def test_missing_gt_exit_1(self, dataset, tmp_path, capsys):
        assert (
            main(
                [
                    "eval",
                    "--data-dir",
                    str(dataset / "data"),
                    "--gt-dir",
                    str(tmp_path / "empty"),
                ]
            )
            == 1
        )

    def test_unknown_test_exit_1(self, dataset, capsys):
        assert (
            main(
                [
                    "eval",
                    "--data-dir",
                    str(dataset / "data"),
                    "--gt-dir",
                    str(dataset / "gt"),
                    "--tests",
                    "chi2",
                ]
            )
            == 1
        )


class TestGen:
    def test_deterministic(self, tmp_path):
        spec = tmp_path / "s.json"
        spec.write_text(
            json.dumps(
                {
                    "years": 2,
                    "rows_per_year": 30,
                    "columns": [{"name": "a", "family": "uniform", "params": [0, 1]}],
                }
            ),
            encoding="utf-8",
        )
        for out in ("g1", "g2"):
            assert main(["gen", "--spec", str(spec), "--seed", "3", "--out", str(tmp_path / out)]) == 0
        a = (tmp_path / "g1" / "data" / "2001.csv").read_bytes()
        b = (tmp_path / "g2" / "data" / "2001.csv").read_bytes()
        assert a == b

    def test_bad_spec_json_exit_1(self, tmp_path, capsys):
        spec = tmp_path / "s.json"
        spec.write_text("{not json", encoding="utf-8")
        assert main(["gen", "--spec", str(spec), "--seed", "1", "--out", str(tmp_path / "o")]) == 1

    def test_invalid_mutation_exit_1(self, tmp_path, capsys):
        spec = tmp_path / "s.json"
        spec.write_text(
            json.dumps(
                {
                    "years": 2,
                    "rows_per_year": 5,
                    "columns": [{"name": "a", "family": "uniform", "params": [0, 1]}],
                    "mutations": [{"year": 2, "op": "remove", "column": "ghost"}],
                }
            ),
            encoding="utf-8",
        )
        assert main(["gen", "--spec", str(spec), "--seed", "1", "--out", str(tmp_path / "o")]) == 1


class TestReport:
    def make_report(self, dataset, tmp_path):
        base = dataset / "data" / "2001.csv"
        out = tmp_path / "rep.json"
        main(["match", "--base", str(base), "--new", str(base), "--out", str(out)])
        return out

    def test_text_format(self, dataset, tmp_path, capsys):
        rep = self.make_report(dataset, tmp_path)
        assert main(["report", "--in", str(rep), "--format", "text"]) == 0
        text = capsys.readouterr().out
        assert "changed=0" in text
        assert "age -> age" in text

    def test_json_format_is_canonical(self, dataset, tmp_path, capsys):
        rep = self.make_report(dataset, tmp_path)
        assert main(["report", "--in", str(rep), "--format", "json"]) == 0
        printed = capsys.readouterr().out.strip()
        assert printed == rep.read_text(encoding="utf-8").strip()

    def test_missing_keys_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"config": {}}', encoding="utf-8")
        assert main(["report", "--in", str(bad)]) == 1


class TestParsing:
    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0

    def test_subcommand_help_lists_flags(self, capsys):
        assert main(["match", "--help"]) == 0
        text = capsys.readouterr().out
        for flag in ("--base", "--new", "--test", "--p-thresh", "--bins", "--top-k", "--out"):
            assert flag in text

    def test_unknown_flag_exit_1(self, capsys):
        assert main(["match", "--nope"]) == 1

    def test_missing_required_exit_1(self, capsys):
        assert main(["match"]) == 1

    def test_no_subcommand_exit_1(self, capsys):
        assert main([]) == 1

    def test_every_subcommand_registered(self):
        parser = build_parser()
        text = parser.format_help()
        for cmd in ("match", "eval", "gen", "serve", "report"):
            assert cmd in text
