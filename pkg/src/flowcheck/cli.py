"""Command-line driver: `flowcheck check` runs the pipeline in-process,
`flowcheck serve` starts the HTTP service."""
from __future__ import annotations

import argparse
import os
import sys

from .checker import check_files


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowcheck", description="Type check mini-ML files and explain errors as data flows")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="type check one or more source files")
    check.add_argument("files", nargs="+", help="source files, concatenated in order")
    check.add_argument("--prelude", default=None, help="prelude file of val declarations (default: embedded)")
    check.add_argument("--verbose", action="store_true", help="expand nested constructor flows")
    check.add_argument("--format", choices=("text", "json"), default="text")
    check.add_argument("--color", action="store_true", help="ANSI color output (NO_COLOR overrides)")
    check.add_argument("--max-errors", type=int, default=None, metavar="N")

    serve = sub.add_parser("serve", help="run the HTTP checking service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def run(argv: list[str]) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .api import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    color = args.color and not os.environ.get("NO_COLOR")
    try:
        outcome = check_files(
            args.files,
            prelude_path=args.prelude,
            mode="verbose" if args.verbose else "compact",
            color=color,
            max_errors=args.max_errors,
        )
    except OSError as e:
        sys.stdout.write(f"[ERROR] Configuration error: {e}\n")
        return 3
    if args.format == "json" and outcome.exit_code in (0, 1):
        sys.stdout.write(outcome.json_doc + "\n")
    else:
        sys.stdout.write(outcome.text)
    return outcome.exit_code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
