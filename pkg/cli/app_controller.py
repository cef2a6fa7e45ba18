# cli/app_controller.py
"""
Controller of the command-line application.
Dispatches parsed subcommands to the modules and coordinates the report cache.
"""

import logging
from argparse import Namespace
from typing import Dict, List, Optional

from core import ConfigManager, Database
from core.utils import parse_family_list, parse_int_list, validate_case_params
from core.errors import InvalidInputError
from .keys import CommandKeys, FormatKeys, StatusKeys
from .modules.dimension import cmd_dim
from .modules.export_complex import cmd_export_complex
from .modules.report import render, summarize, write_output
from .modules.suites import Selection, build_cases, resolve_suites
from .modules.verification import Case, VerificationReport, run_cases

LOGGER = logging.getLogger(__name__)


class AppController:
    """
    Runs subcommands against the configuration and the report database.
    """

    def __init__(self, config: ConfigManager, database: Database):
        self.config = config
        self.database = database

    def handle_command(self, args: Namespace) -> int:
        """
        Processes one parsed command line and returns the exit code.
        """
        command = args.command
        if command == CommandKeys.DIM:
            return self.run_dim(args)
        elif command == CommandKeys.VERIFY:
            return self.run_verify(args)
        elif command == CommandKeys.REPORT:
            return self.run_report(args)
        elif command == CommandKeys.EXPORT_COMPLEX:
            return self.run_export_complex(args)
        elif command == CommandKeys.CONFIG:
            return self.run_config(args)
        raise InvalidInputError(f"unknown command {command!r}")

    # ==============================================
    # SETTINGS
    # ==============================================

    def _setting(self, args: Namespace, name: str, key: Optional[str] = None):
        value = getattr(args, name, None)
        return self.config.get(key or name) if value is None else value

    def selection(self, args: Namespace) -> Selection:
        """Grid and run settings from flags, falling back to the saved configuration."""
        families = tuple(parse_family_list(args.family)) if getattr(args, "family", None) else None
        ns = tuple(parse_int_list(args.n)) if getattr(args, "n", None) else None
        ps = tuple(parse_int_list(args.p)) if getattr(args, "p", None) else None
        for family in families or ("GL",):
            for n in ns or (0,):
                for p in ps or (2,):
                    ok, message = validate_case_params(family, n, p)
                    if not ok:
                        raise InvalidInputError(message)
        capacity = getattr(args, "capacity", None)
        return Selection(
            families=families,
            ns=ns,
            ps=ps,
            ring=self._setting(args, "ring"),
            seed=int(self._setting(args, "seed")),
            samples=int(self._setting(args, "samples")),
            grid=getattr(args, "grid", None) or "small",
            group_capacity=capacity or self.config.get("group_capacity"),
            bar_capacity=capacity or self.config.get("bar_capacity"),
            cell_capacity=capacity or self.config.get("cell_capacity"),
        )

    # ==============================================
    # COMMANDS
    # ==============================================

    def run_dim(self, args: Namespace) -> int:
        result = cmd_dim(args.family, args.n, args.p, self._setting(args, "ring"),
                         args.capacity or self.config.get("cell_capacity"))
        print(result.line())
        return 1 if result.status == StatusKeys.FAIL else 0

    def run_verify(self, args: Namespace) -> int:
        sel = self.selection(args)
        reports = self.verify(args.suite, sel, self._setting(args, "workers"), refresh=True)
        write_output(render(reports, args.format or FormatKeys.JSON, args.timings), args.out)
        return self._exit_code(reports)

    def run_report(self, args: Namespace) -> int:
        sel = self.selection(args)
        reports = self.verify(args.suite or "all", sel, self._setting(args, "workers"), refresh=args.refresh)
        write_output(render(reports, args.format or FormatKeys.JSON, args.timings), args.out)
        return self._exit_code(reports)

    def run_export_complex(self, args: Namespace) -> int:
        text = cmd_export_complex(args.family, args.n, args.p, args.boundary,
                                  args.capacity or self.config.get("cell_capacity"))
        write_output(text, args.out)
        return 0

    def run_config(self, args: Namespace) -> int:
        if args.action == "set":
            value = self.config.set(args.key, args.value)
            self.config.save_config()
            print(f"{args.key} = {value!r}")
        else:
            for key in sorted(self.config.config):
                print(f"{key} = {self.config.config[key]!r}")
        return 0

    # ==============================================
    # VERIFICATION WITH CACHE
    # ==============================================

    def verify(self, suite: str, sel: Selection, workers: int = 1,
               refresh: bool = False) -> List[VerificationReport]:
        """
        Runs the cases of ``suite``, reusing cached reports unless ``refresh``.
        A cached report is reused only when it was computed with the same seed and
        run parameters; capacity skips are always recomputed.
        """
        cases = build_cases(suite, sel)
        records: Dict[str, Dict] = {}
        if not refresh:
            for record in self.database.get_reports(sel.seed, resolve_suites(suite)):
                if record["status"] != StatusKeys.SKIPPED:
                    records[record["case_id"]] = record
        cached: List[VerificationReport] = []
        pending: List[Case] = []
        for case in cases:
            record = records.get(case.case_id)
            if record is not None and record["params"] == case.cache_key:
                cached.append(VerificationReport.from_dict(record))
            else:
                pending.append(case)
        LOGGER.info("%d cases, %d cached, %d to run", len(cases), len(cases) - len(pending), len(pending))
        fresh = run_cases(pending, workers=max(1, int(workers)), show_progress=bool(self.config.get("progress")))
        by_id = {c.case_id: c for c in pending}
        for report in fresh:
            case = by_id[report.case_id]
            self.database.insert_report(sel.seed, case.suite, report.to_dict(timings=True), case.cache_key)
        reports = cached + fresh
        counts = summarize(reports)
        LOGGER.info("summary: %s", ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))
        return sorted(reports, key=lambda r: r.case_id)

    @staticmethod
    def _exit_code(reports: List[VerificationReport]) -> int:
        return 1 if any(r.failed for r in reports) else 0

