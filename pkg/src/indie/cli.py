"""Command-line interface: batch proof checking (with a golden goal-state
dump mode) and the interactive session protocol on standard streams."""

from __future__ import annotations

import argparse
import sys

from .kernel import reduce as kernel_reduce
from .loader import standard_library
from .script import format_report
from .session import serve_session


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="indie")
    parser.add_argument(
        "--transparency-log",
        action="store_true",
        help="print the transparency of every definitional-equality check to stderr",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("check", help="check every lemma of a .ind file")
    check.add_argument("file")
    check.add_argument(
        "--golden", action="store_true", help="print the goal state after each tactic"
    )
    sub.add_parser("serve", help="serve the JSON session protocol on stdio")

    args = parser.parse_args(argv)
    if args.transparency_log:
        kernel_reduce.DEFEQ_OBSERVER = lambda t: print(f"defeq {t.name}", file=sys.stderr)

    if args.command == "check":
        lib = standard_library()
        with open(args.file, "r", encoding="utf-8") as fh:
            text = fh.read()
        report = lib.load_text(text, golden=args.golden)
        sys.stdout.write(format_report(report, golden=args.golden))
        return 0 if report.all_proved else 1
    if args.command == "serve":
        serve_session(sys.stdin, sys.stdout)
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
