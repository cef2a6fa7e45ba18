import json
import sqlite3

import pytest

from core import ConfigManager, Database
from core.utils import (
    format_homology,
    format_millis,
    make_case_id,
    parse_family_list,
    parse_int_list,
    validate_case_params,
    validate_prime,
)


def _report(case_id, status="pass", measured=None):
    return {
        "case_id": case_id,
        "statement": "rank equals p^N",
        "family": "GL",
        "n": 2,
        "p": 3,
        "ring": "Z",
        "status": status,
        "measured": measured or {"rank": 3},
        "expected": {"rank": 3},
        "millis": 1.5,
    }


class TestConfig:
    def test_defaults(self, data_dir):
        config = ConfigManager()
        assert config.get("seed") == 0
        assert config.get("ring") == "Z"
        assert config.config_path == data_dir / "config.json"

    def test_set_parses_by_type(self):
        config = ConfigManager()
        assert config.set("samples", "1_000") == 1000
        assert config.set("progress", "off") is False
        assert config.set("ring", "F3") == "F3"

    def test_unknown_key(self):
        with pytest.raises(KeyError):
            ConfigManager().set("colour", "dark")

    def test_save_and_reload(self, data_dir):
        config = ConfigManager()
        config.set("seed", "42")
        config.save_config()
        assert json.loads((data_dir / "config.json").read_text(encoding="utf-8"))["seed"] == 42
        assert ConfigManager().get("seed") == 42

    def test_missing_keys_fall_back_to_defaults(self, data_dir):
        data_dir.mkdir(parents=True, exist_ok=True)
        (data_dir / "config.json").write_text('{"seed": 7}', encoding="utf-8")
        config = ConfigManager()
        assert config.get("seed") == 7
        assert config.get("workers") == 1

    def test_corrupt_file(self, data_dir):
        data_dir.mkdir(parents=True, exist_ok=True)
        (data_dir / "config.json").write_text("{not json", encoding="utf-8")
        assert ConfigManager().get("samples") == 50


class TestDatabase:
    def test_insert_and_get(self):
        db = Database()
        db.insert_report(0, "steinberg", _report("steinberg/GL/n02/p03/Z"))
        db.insert_report(0, "groups", _report("groups/GL/n02/p03"))
        rows = db.get_reports(0)
        assert [r["case_id"] for r in rows] == ["groups/GL/n02/p03", "steinberg/GL/n02/p03/Z"]
        assert rows[0]["measured"] == {"rank": 3}
        assert db.get_suites(0) == ["groups", "steinberg"]

    def test_replace_same_case(self):
        db = Database()
        db.insert_report(1, "steinberg", _report("a"))
        db.insert_report(1, "steinberg", _report("a", "fail", {"rank": 2}))
        rows = db.get_reports(1)
        assert len(rows) == 1
        assert rows[0]["status"] == "fail"

    def test_filters(self):
        db = Database()
        db.insert_report(1, "steinberg", _report("a"))
        db.insert_report(1, "groups", _report("b"))
        db.insert_report(2, "groups", _report("b"))
        assert [r["case_id"] for r in db.get_reports(1, ["groups"])] == ["b"]
        assert db.get_total_reports() == 3
        assert db.delete_reports(seed=1, suite="groups") == 1
        assert db.delete_reports() == 2

    def test_params_are_stored(self):
        db = Database()
        db.insert_report(3, "relation", _report("a"), '{"samples": 5}')
        db.insert_report(3, "relation", _report("b"))
        assert [r["params"] for r in db.get_reports(3)] == ['{"samples": 5}', ""]

    def test_older_tables_gain_params(self, data_dir):
        data_dir.mkdir(parents=True, exist_ok=True)
        with sqlite3.connect(data_dir / "reports.db") as conn:
            conn.execute(
                "CREATE TABLE reports (id INTEGER PRIMARY KEY AUTOINCREMENT, seed INTEGER NOT NULL, "
                "suite TEXT NOT NULL, case_id TEXT NOT NULL, statement TEXT NOT NULL, family TEXT DEFAULT '', "
                "n INTEGER, p INTEGER, ring TEXT DEFAULT 'Z', status TEXT NOT NULL, measured TEXT DEFAULT '{}', "
                "expected TEXT DEFAULT '{}', millis REAL DEFAULT 0, "
                "creation_date TIMESTAMP DEFAULT CURRENT_TIMESTAMP, UNIQUE (seed, suite, case_id))"
            )
        db = Database()
        db.insert_report(0, "groups", _report("g"), "{}")
        assert db.get_reports(0)[0]["params"] == "{}"


class TestUtils:
    @pytest.mark.parametrize("text,values", [("2,3,5", [2, 3, 5]), ("2-4", [2, 3, 4]), ("5, 2-3,3", [2, 3, 5])])
    def test_parse_int_list(self, text, values):
        assert parse_int_list(text) == values

    @pytest.mark.parametrize("text", ["", "4-2", "x"])
    def test_parse_int_list_errors(self, text):
        with pytest.raises(ValueError):
            parse_int_list(text)

    def test_parse_family_list(self):
        assert parse_family_list("gl,Sp,GL") == ["GL", "Sp"]

    def test_validation(self):
        assert validate_prime(97)
        assert not validate_prime(4)
        assert not validate_prime(101)
        assert validate_case_params("Sp", 2, 3) == (True, "")
        assert not validate_case_params("GL", -1, 3)[0]
        assert not validate_case_params("E8", 2, 3)[0]

    def test_make_case_id(self):
        assert make_case_id("coinvariants", "GL", 3, 2, "Z") == "coinvariants/GL/n03/p02/Z"
        assert make_case_id("zeta", "", None, 5, "", "surjective") == "zeta/p05/surjective"

    def test_formatting(self):
        assert format_homology(0) == "0"
        assert format_homology(2, (3,)) == "Z^2 + Z/3"
        assert format_millis(12.4) == "12 ms"
        assert format_millis(2500) == "2.50 s"
