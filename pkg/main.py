# main.py
"""
Main entry point of the Steinberg verification toolkit.
Parses the command line, configures logging and hands over to the controller.
"""

import argparse
import logging
import sys
from typing import List, Optional

from core import ConfigManager, Database, SteinbergError
from cli.app_controller import AppController
from cli.keys import CommandKeys, FormatKeys, SuiteKeys

LOGGER = logging.getLogger("steinberg")


def _grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", help="families, e.g. GL,Sp (default: the suite grid)")
    parser.add_argument("--n", help="rank parameters, e.g. 2,3 or 2-4")
    parser.add_argument("--p", help="primes, e.g. 2,3,5")
    parser.add_argument("--ring", help="coefficients: Z, Q, Fp or F<prime>")
    parser.add_argument("--seed", type=int, help="seed of every randomized check")
    parser.add_argument("--samples", type=int, help="random samples per case")
    parser.add_argument("--capacity", type=int, help="size bound for groups, complexes and bar complexes")
    parser.add_argument("--grid", choices=("small", "large"), help="default parameter grid")
    parser.add_argument("--workers", type=int, help="worker processes")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=(FormatKeys.JSON, FormatKeys.CSV), default=FormatKeys.JSON)
    parser.add_argument("--timings", action="store_true", help="include wall time in JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steinberg",
        description="Exact verification of Steinberg-module statements for finite classical groups.",
    )
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    dim = sub.add_parser(CommandKeys.DIM, help="rank of the Steinberg module")
    dim.add_argument("family")
    dim.add_argument("n", type=int)
    dim.add_argument("p", type=int)
    dim.add_argument("--ring")
    dim.add_argument("--capacity", type=int)

    verify = sub.add_parser(CommandKeys.VERIFY, help="run a verification suite")
    verify.add_argument("suite", choices=SuiteKeys.ORDERED + (SuiteKeys.ALL,))
    _grid_flags(verify)

    report = sub.add_parser(CommandKeys.REPORT, help="consolidated report, reusing cached runs")
    report.add_argument("--suite", choices=SuiteKeys.ORDERED + (SuiteKeys.ALL,))
    report.add_argument("--refresh", action="store_true", help="ignore cached reports")
    _grid_flags(report)

    export = sub.add_parser(CommandKeys.EXPORT_COMPLEX, help="list the simplices of a building")
    export.add_argument("family")
    export.add_argument("n", type=int)
    export.add_argument("p", type=int)
    export.add_argument("--boundary", type=int, help="emit the boundary map of this degree instead")
    export.add_argument("--capacity", type=int)
    export.add_argument("--out")

    config = sub.add_parser(CommandKeys.CONFIG, help="show or change saved settings")
    config.add_argument("action", choices=("show", "set"))
    config.add_argument("key", nargs="?")
    config.add_argument("value", nargs="?")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main application function"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == CommandKeys.CONFIG and args.action == "set" and (args.key is None or args.value is None):
        parser.error("config set needs KEY and VALUE")

    config = ConfigManager()
    logging.basicConfig(
        level=(args.log_level or config.get("log_level") or "WARNING").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        controller = AppController(config, Database())
        return controller.handle_command(args)
    except (SteinbergError, KeyError, ValueError) as e:
        LOGGER.error("%s", e)
        return 2
    except OSError as e:
        LOGGER.error("cannot write output: %s", e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
