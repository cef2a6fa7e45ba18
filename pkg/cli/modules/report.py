# cli/modules/report.py
"""
Serialization of verification reports to JSON and CSV.
JSON is validated against the published schema before it is written.
"""

import csv
import io
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import jsonschema

from ..keys import FormatKeys
from .verification import VerificationReport

LOGGER = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parents[2] / "docs" / "report_schema.json"

CSV_COLUMNS = ("case_id", "statement", "family", "n", "p", "ring", "status", "measured", "expected", "millis")


@lru_cache(maxsize=1)
def load_schema() -> Dict[str, Any]:
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def validate_records(records: List[Dict[str, Any]]) -> None:
    """Raises ``jsonschema.ValidationError`` when the records do not match the schema."""
    jsonschema.validate(instance=records, schema=load_schema())


def to_json(reports: Sequence[VerificationReport], timings: bool = False) -> str:
    """Deterministic JSON array: sorted keys, reports ordered by case id, no timings by default."""
    records = [r.to_dict(timings) for r in sorted(reports, key=lambda r: r.case_id)]
    validate_records(records)
    return json.dumps(records, sort_keys=True, indent=2) + "\n"


def to_csv(reports: Sequence[VerificationReport]) -> str:
    """One row per report; measured and expected are embedded as compact JSON."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sorted(reports, key=lambda r: r.case_id):
        writer.writerow([
            r.case_id, r.statement, r.family,
            "" if r.n is None else r.n,
            "" if r.p is None else r.p,
            r.ring, r.status,
            json.dumps(r.measured, sort_keys=True, separators=(",", ":")),
            json.dumps(r.expected, sort_keys=True, separators=(",", ":")),
            f"{r.millis:.3f}",
        ])
    return buffer.getvalue()


def render(reports: Sequence[VerificationReport], fmt: str = FormatKeys.JSON, timings: bool = False) -> str:
    if fmt == FormatKeys.JSON:
        return to_json(reports, timings)
    if fmt == FormatKeys.CSV:
        return to_csv(reports)
    raise ValueError(f"unknown format {fmt!r}")


def write_output(text: str, out: Optional[str] = None) -> None:
    """Writes to ``out`` or, without a path, to stdout."""
    if not out or out == "-":
        print(text, end="")
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    LOGGER.info("wrote %s", path)


def summarize(reports: Sequence[VerificationReport]) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for r in reports:
        counts[r.status] = counts.get(r.status, 0) + 1
    return counts
