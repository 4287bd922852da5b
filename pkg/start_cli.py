#!/usr/bin/env python3
"""
Dynamics Toolkit - Command-Line Launcher

Entry point for the covering search, entropy estimation and lacunary product
runs. Configures logging centrally, loads environment variables, reads the run
configuration and maps outcomes to exit codes:

    0  success
    2  usage or configuration error (one JSON line on standard error)
    3  honest negative (budget exhausted, tail too close, ...)

Main Functions:
- build_parser: argparse definition (long-form flags only)
- main: Entry point returning the exit code

Dependencies:
- python-dotenv: For loading environment variables
- logging: For application logging

Usage:
    python start_cli.py covering-search --config sources/exp_n3.json
    python start_cli.py entropy --config sources/squaring_circle.json --out-dir outputs/circle
    python start_cli.py example-product --config sources/lacunary_example.json

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import sys
import json
import logging
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from dyn_settings import LOG_LEVEL, TOOLKIT_VERSION
from app.trace_utils import to_jsonable
from app.commands import (EXIT_CONFIG, EXIT_NEGATIVE, cmd_covering_search, cmd_entropy, cmd_example_product,
                          load_run_config)
from utils.errors import ConfigError, ToolkitError

# Load environment variables from .env file
load_dotenv(dotenv_path=Path(__file__).parent / ".env")

# Configure logging centrally
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format='%(asctime)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler()
    ]
)

COMMANDS = {
    "covering-search": cmd_covering_search,
    "entropy": cmd_entropy,
    "example-product": cmd_example_product,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message, {"usage": self.format_usage().strip()})


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="start_cli.py", description="Self-covering domains and entropy bounds for entire functions",
                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOLKIT_VERSION}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="run configuration (JSON file)")
    parser.add_argument("--function", help="function description as a JSON string or a path to a JSON file")
    parser.add_argument("--n-cover", type=int, dest="N", help="required number of preimages")
    parser.add_argument("--r-start", type=float, dest="R_start", help="first radius of the schedule")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--out-dir", dest="out_dir", help="artifact directory")
    parser.add_argument("--threads", type=int, help="worker threads (0 = logical cores)")
    return parser


def _function_override(raw: Optional[str]) -> Optional[Dict[str, Any]]:
    if raw is None:
        return None
    path = Path(raw)
    try:
        if path.is_file():
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed --function JSON: {e.msg}", {"value": raw}) from e


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        overrides = {"function": _function_override(args.function), "N": args.N, "R_start": args.R_start,
                     "seed": args.seed, "out_dir": args.out_dir, "threads": args.threads}
        config = load_run_config(args.config, overrides)
        logging.info(f"Dynamics Toolkit {TOOLKIT_VERSION}: {args.command} with {config.spec().label()}")
        return COMMANDS[args.command](config)
    except ConfigError as error:
        print(json.dumps(to_jsonable(error.to_dict())), file=sys.stderr)
        return EXIT_CONFIG
    except ToolkitError as error:
        logging.error(f"{error.__class__.__name__}: {error}")
        print(f"{error.__class__.__name__}: {error}")
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
