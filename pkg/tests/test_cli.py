import csv
import io
import json

import jsonschema
import pytest

from core import ConfigManager, Database
from core.errors import CapacityError, InvalidInputError, TheoremViolation, UnknownSuiteError
from cli.keys import StatusKeys, SuiteKeys
from cli.modules import suites
from cli.modules.dimension import cmd_dim
from cli.modules.export_complex import cmd_export_complex
from cli.modules.report import to_csv, to_json, validate_records
from cli.modules.suites import Selection, build_cases
from cli.modules.verification import Case, VerificationReport, reproduces, run_case, run_cases
from main import build_parser, main


def _zeta_case(p=2):
    return build_cases(SuiteKeys.ZETA, Selection(ps=(p,)))[0]


class TestParser:
    def test_verify_flags(self):
        args = build_parser().parse_args(["verify", "zeta", "--p", "2,3", "--timings"])
        assert args.command == "verify"
        assert args.suite == "zeta"
        assert args.p == "2,3"
        assert args.timings

    def test_unknown_suite_rejected(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["verify", "everything"])


class TestDimension:
    def test_gl3(self):
        result = cmd_dim("GL", 3, 2)
        assert (result.measured, result.expected, result.status) == (8, 8, StatusKeys.PASS)
        assert "rank 8" in result.line()

    def test_rank_one(self):
        result = cmd_dim("SL", 1, 5)
        assert result.measured == 1
        assert result.status == StatusKeys.PASS

    def test_capacity_skip(self):
        result = cmd_dim("GL", 3, 3, capacity=10)
        assert result.status == StatusKeys.SKIPPED
        assert result.measured is None


class TestExport:
    def test_boundary(self):
        text = cmd_export_complex("GL", 2, 2, boundary=0)
        assert text.splitlines() == ["# boundary 0 of GL n=2 p=2", "0 0 1", "0 1 1", "0 2 1"]

    def test_boundary_out_of_range(self):
        with pytest.raises(InvalidInputError):
            cmd_export_complex("GL", 2, 2, boundary=3)


class TestCases:
    def test_cases_are_sorted(self):
        cases = build_cases(SuiteKeys.ALL, Selection(families=("GL",), ns=(2,), ps=(2,)))
        ids = [c.case_id for c in cases]
        assert ids == sorted(ids)
        assert len(ids) == len(set(ids))
        assert {c.suite for c in cases} >= {SuiteKeys.GROUPS, SuiteKeys.STEINBERG}

    def test_unknown_suite(self):
        with pytest.raises(UnknownSuiteError):
            build_cases("nope", Selection())

    def test_zeta_case(self):
        case = _zeta_case()
        assert case.case_id == "zeta/GL/n03/p02/Z"
        report = run_case(case)
        assert report.status == StatusKeys.PASS
        assert report.measured["rank"] == 2
        assert report.expected == {"rank": 2, "surjective": True}

    def test_pass_rule(self):
        assert reproduces({"rank": 2, "extra": 1}, {"rank": 2})
        assert not reproduces({"rank": 2}, {"rank": 3})
        assert not reproduces({"rank": 2}, {})

    def test_violation_is_a_failure(self, monkeypatch):
        def broken(case):
            raise TheoremViolation("zeta is surjective", "rank 1")

        monkeypatch.setitem(suites.CHECKS, SuiteKeys.ZETA, broken)
        report = run_case(_zeta_case())
        assert report.failed
        assert report.measured == {"violation": "zeta is surjective", "detail": "rank 1"}

    def test_capacity_is_a_skip(self, monkeypatch):
        def too_big(case):
            raise CapacityError("group", 10, 5)

        monkeypatch.setitem(suites.CHECKS, SuiteKeys.ZETA, too_big)
        report = run_case(_zeta_case())
        assert report.status == StatusKeys.SKIPPED
        assert report.measured["capacity"] == {"what": "group", "estimated": 10, "limit": 5}

    def test_run_cases_sorts(self):
        cases = [Case("x", "b", "s"), Case("x", "a", "s")]
        reports = run_cases(cases, show_progress=False, runner=lambda c: VerificationReport(
            c.case_id, c.statement, "", None, None, "Z", StatusKeys.PASS))
        assert [r.case_id for r in reports] == ["a", "b"]


class TestReports:
    def _reports(self):
        return [
            VerificationReport("b", "s", "GL", 2, 3, "Z", "pass", {"rank": 3}, {"rank": 3}, 12.5),
            VerificationReport("a", "s", "", None, 2, "F2", "fail", {"rank": [1, [2]]}, {"rank": [0, []]}, 1.0),
        ]

    def test_json_is_deterministic(self):
        reports = self._reports()
        text = to_json(reports)
        assert text == to_json(list(reversed(reports)))
        records = json.loads(text)
        assert [r["case_id"] for r in records] == ["a", "b"]
        assert "millis" not in records[0]
        assert json.loads(to_json(reports, timings=True))[1]["millis"] == 12.5

    def test_schema_rejects_unknown_status(self):
        record = self._reports()[0].to_dict()
        record["status"] = "maybe"
        with pytest.raises(jsonschema.ValidationError):
            validate_records([record])

    def test_csv(self):
        rows = list(csv.reader(io.StringIO(to_csv(self._reports()))))
        assert rows[0][0] == "case_id"
        assert rows[1][:7] == ["a", "s", "", "", "2", "F2", "fail"]
        assert json.loads(rows[1][7]) == {"rank": [1, [2]]}
        assert rows[2][9] == "12.500"


class TestMain:
    def test_verify_zeta(self, capsys):
        assert main(["verify", "zeta", "--p", "2"]) == 0
        records = json.loads(capsys.readouterr().out)
        assert [r["status"] for r in records] == ["pass"]
        assert Database().get_total_reports() == 1

    def test_report_uses_the_cache(self, capsys, monkeypatch):
        assert main(["report", "--suite", "zeta", "--p", "2"]) == 0
        first = capsys.readouterr().out

        def unexpected(case):
            raise AssertionError("cached case was recomputed")

        monkeypatch.setitem(suites.CHECKS, SuiteKeys.ZETA, unexpected)
        assert main(["report", "--suite", "zeta", "--p", "2"]) == 0
        assert capsys.readouterr().out == first

    def test_csv_to_file(self, tmp_path):
        out = tmp_path / "zeta.csv"
        assert main(["verify", "zeta", "--p", "3", "--format", "csv", "--out", str(out)]) == 0
        rows = list(csv.reader(io.StringIO(out.read_text(encoding="utf-8"))))
        assert rows[1][0] == "zeta/GL/n03/p03/Z"

    def test_dim(self, capsys):
        assert main(["dim", "GL", "2", "3"]) == 0
        assert "rank 3" in capsys.readouterr().out

    def test_config(self, capsys):
        assert main(["config", "set", "seed", "5"]) == 0
        assert ConfigManager().get("seed") == 5
        assert main(["config", "show"]) == 0
        assert "seed = 5" in capsys.readouterr().out

    def test_config_errors(self):
        assert main(["config", "set", "colour", "dark"]) == 2
        with pytest.raises(SystemExit):
            main(["config", "set", "seed"])

    def test_invalid_prime(self):
        assert main(["verify", "zeta", "--p", "4"]) == 2

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        assert main(["verify", "zeta", "--p", "2", "--out", str(blocker / "zeta.json")]) == 2

    def test_cache_follows_the_sample_count(self, capsys):
        assert main(["verify", "relation", "--n", "2", "--p", "2", "--samples", "5"]) == 0
        assert json.loads(capsys.readouterr().out)[0]["measured"]["samples"] == 5
        assert main(["report", "--suite", "relation", "--n", "2", "--p", "2", "--samples", "3"]) == 0
        record = json.loads(capsys.readouterr().out)[0]
        assert record["measured"] == {"samples": 3, "zero_chains": 3}

    def test_capacity_skips_are_retried(self, capsys):
        grid = ["--family", "GL", "--n", "3", "--p", "2"]
        assert main(["verify", "steinberg", *grid, "--capacity", "5"]) == 0
        assert {r["status"] for r in json.loads(capsys.readouterr().out)} == {StatusKeys.SKIPPED}
        assert main(["report", "--suite", "steinberg", *grid, "--capacity", "1000000"]) == 0
        assert {r["status"] for r in json.loads(capsys.readouterr().out)} == {StatusKeys.PASS}

    def test_same_seed_gives_identical_json(self, capsys):
        args = ["verify", "relation", "--seed", "7", "--n", "2,3", "--p", "2,3", "--samples", "4"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first
        assert main(["report", "--suite", "relation", "--refresh", *args[2:]]) == 0
        assert capsys.readouterr().out == first
