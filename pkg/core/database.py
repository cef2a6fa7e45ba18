# core/database.py
"""
SQLite cache of verification reports.
Stores one row per (seed, suite, case) so that ``report`` can reuse earlier
runs and only recompute what is missing.
"""

import json
import logging
import sqlite3
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .config_manager import data_directory

LOGGER = logging.getLogger(__name__)

REPORT_FIELDS = (
    "case_id", "statement", "family", "n", "p", "ring", "status", "measured", "expected", "millis",
)


class Database:
    def __init__(self, data_dir: Optional[Path] = None):
        """
        Opens (and if needed creates) ``reports.db`` in the data directory.
        """
        self.data_dir = Path(data_dir) if data_dir else data_directory()
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.db_file = self.data_dir / "reports.db"
        self._create_tables()

    def _create_tables(self) -> None:
        with sqlite3.connect(self.db_file) as conn:
            cursor = conn.cursor()
            cursor.execute("""
                CREATE TABLE IF NOT EXISTS reports (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    seed INTEGER NOT NULL,
                    suite TEXT NOT NULL,
                    case_id TEXT NOT NULL,
                    statement TEXT NOT NULL,
                    family TEXT DEFAULT '',
                    n INTEGER,
                    p INTEGER,
                    ring TEXT DEFAULT 'Z',
                    status TEXT NOT NULL,
                    measured TEXT DEFAULT '{}',
                    expected TEXT DEFAULT '{}',
                    millis REAL DEFAULT 0,
                    params TEXT DEFAULT '',
                    creation_date TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                    UNIQUE (seed, suite, case_id)
                )
            """)
            columns = {row[1] for row in cursor.execute("PRAGMA table_info(reports)")}
            if "params" not in columns:
                cursor.execute("ALTER TABLE reports ADD COLUMN params TEXT DEFAULT ''")

    # ==============================================
    # REPORT METHODS
    # ==============================================

    def insert_report(self, seed: int, suite: str, report: Dict[str, Any], params: str = "") -> None:
        """
        Stores a report, replacing an earlier one with the same seed, suite and case id.

        Args:
            seed: Seed of the run that produced the report
            suite: Suite name
            report: Report as produced by ``VerificationReport.to_dict(timings=True)``
            params: Serialized run parameters the report depends on
        """
        with sqlite3.connect(self.db_file) as conn:
            conn.execute("""
                INSERT OR REPLACE INTO reports (
                    seed, suite, case_id, statement, family, n, p, ring,
                    status, measured, expected, millis, params
                ) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """, (
                seed, suite, report["case_id"], report["statement"], report.get("family", ""),
                report.get("n"), report.get("p"), report.get("ring", "Z"), report["status"],
                json.dumps(report.get("measured", {}), sort_keys=True),
                json.dumps(report.get("expected", {}), sort_keys=True),
                float(report.get("millis", 0.0)),
                params,
            ))

    def get_reports(self, seed: int, suites: Optional[Sequence[str]] = None) -> List[Dict[str, Any]]:
        """
        Returns cached reports of a seed, ordered by case id.
        Each record also carries the ``params`` it was computed with.

        Args:
            seed: Seed of the runs
            suites: Restrict to these suites (all when None)

        Returns:
            List of report dictionaries
        """
        query = f"SELECT {', '.join(REPORT_FIELDS)}, params FROM reports WHERE seed = ?"
        params: List[Any] = [seed]
        if suites:
            query += f" AND suite IN ({', '.join('?' for _ in suites)})"
            params.extend(suites)
        query += " ORDER BY case_id"
        with sqlite3.connect(self.db_file) as conn:
            rows = conn.execute(query, params).fetchall()
        out = []
        for row in rows:
            record = dict(zip(REPORT_FIELDS + ("params",), row))
            record["params"] = record["params"] or ""
            record["measured"] = json.loads(record["measured"] or "{}")
            record["expected"] = json.loads(record["expected"] or "{}")
            out.append(record)
        return out

    def get_suites(self, seed: int) -> List[str]:
        with sqlite3.connect(self.db_file) as conn:
            rows = conn.execute(
                "SELECT DISTINCT suite FROM reports WHERE seed = ? ORDER BY suite", (seed,)
            ).fetchall()
        return [r[0] for r in rows]

    def get_total_reports(self) -> int:
        with sqlite3.connect(self.db_file) as conn:
            return conn.execute("SELECT COUNT(*) FROM reports").fetchone()[0]

    def delete_reports(self, seed: Optional[int] = None, suite: Optional[str] = None) -> int:
        """Deletes cached reports (all, one seed, or one seed and suite); returns the count."""
        query = "DELETE FROM reports"
        clauses, params = [], []
        if seed is not None:
            clauses.append("seed = ?")
            params.append(seed)
        if suite is not None:
            clauses.append("suite = ?")
            params.append(suite)
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        with sqlite3.connect(self.db_file) as conn:
            deleted = conn.execute(query, params).rowcount
        LOGGER.debug("deleted %d cached reports", deleted)
        return deleted
