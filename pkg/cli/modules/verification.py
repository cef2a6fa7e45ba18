# cli/modules/verification.py
"""
Verification cases and reports.
A case names one checked statement at fixed parameters; running it produces a
report carrying the measured and expected numbers, never just a boolean.
"""

import json
import logging
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from core.errors import CapacityError, SteinbergError, TheoremViolation
from ..keys import StatusKeys
from ..utils.progress import progress

LOGGER = logging.getLogger(__name__)

CheckResult = Tuple[Dict[str, Any], Dict[str, Any]]


@dataclass(frozen=True)
class Case:
    suite: str
    case_id: str
    statement: str
    family: str = ""
    n: Optional[int] = None
    p: Optional[int] = None
    ring: str = "Z"
    params: Tuple[Tuple[str, Any], ...] = ()

    def param(self, key: str, default: Any = None) -> Any:
        return dict(self.params).get(key, default)

    @property
    def cache_key(self) -> str:
        """The run parameters a cached report must share to be reused."""
        return json.dumps(jsonable(dict(self.params)), sort_keys=True, default=str)


@dataclass
class VerificationReport:
    case_id: str
    statement: str
    family: str
    n: Optional[int]
    p: Optional[int]
    ring: str
    status: str
    measured: Dict[str, Any] = field(default_factory=dict)
    expected: Dict[str, Any] = field(default_factory=dict)
    millis: float = 0.0

    @property
    def failed(self) -> bool:
        return self.status == StatusKeys.FAIL

    def to_dict(self, timings: bool = False) -> Dict[str, Any]:
        out = {
            "case_id": self.case_id,
            "statement": self.statement,
            "family": self.family,
            "n": self.n,
            "p": self.p,
            "ring": self.ring,
            "status": self.status,
            "measured": self.measured,
            "expected": self.expected,
        }
        if timings:
            out["millis"] = round(self.millis, 3)
        return out

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "VerificationReport":
        return cls(
            record["case_id"], record["statement"], record.get("family", ""), record.get("n"),
            record.get("p"), record.get("ring", "Z"), record["status"], record.get("measured", {}),
            record.get("expected", {}), float(record.get("millis") or 0.0),
        )


def jsonable(value: Any) -> Any:
    """Tuples to lists and numpy scalars to ints, recursively."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return value.item()
    return value


def reproduces(measured: Dict[str, Any], expected: Dict[str, Any]) -> bool:
    """Every expected entry is present and equal; measured may carry extra diagnostics."""
    return bool(expected) and all(k in measured and measured[k] == v for k, v in expected.items())


def run_case(case: Case) -> VerificationReport:
    """Runs one case; capacity overruns are skips, violations and errors are failures."""
    from .suites import CHECKS

    start = time.perf_counter()
    try:
        measured, expected = CHECKS[case.suite](case)
        measured, expected = jsonable(measured), jsonable(expected)
        status = StatusKeys.PASS if reproduces(measured, expected) else StatusKeys.FAIL
    except CapacityError as e:
        status = StatusKeys.SKIPPED
        measured = {"capacity": {"what": e.what, "estimated": e.estimated, "limit": e.limit}}
        expected = {}
    except TheoremViolation as e:
        status = StatusKeys.FAIL
        measured = {"violation": e.statement, "detail": e.detail or ""}
        expected = {}
    except SteinbergError as e:
        status = StatusKeys.FAIL
        measured = {"error": f"{type(e).__name__}: {e}"}
        expected = {}
    except Exception as e:
        LOGGER.exception("case %s raised", case.case_id)
        status = StatusKeys.FAIL
        measured = {"error": f"{type(e).__name__}: {e}"}
        expected = {}
    millis = (time.perf_counter() - start) * 1000.0
    LOGGER.info("%s: %s (%.0f ms)", case.case_id, status, millis)
    return VerificationReport(case.case_id, case.statement, case.family, case.n, case.p, case.ring,
                              status, measured, expected, millis)


def run_cases(cases: Sequence[Case], workers: int = 1, show_progress: bool = True,
              runner: Callable[[Case], VerificationReport] = run_case) -> List[VerificationReport]:
    """Runs the cases (in a process pool when ``workers`` > 1); reports come back sorted by case id."""
    if workers > 1 and len(cases) > 1:
        with Pool(processes=workers) as pool:
            reports = list(progress(pool.imap_unordered(runner, cases), total=len(cases),
                                    desc="verifying", enabled=show_progress))
    else:
        reports = [runner(c) for c in progress(cases, total=len(cases), desc="verifying", enabled=show_progress)]
    return sorted(reports, key=lambda r: r.case_id)
