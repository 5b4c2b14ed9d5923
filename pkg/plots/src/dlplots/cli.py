"""dlplots: render dlgibbs CSV outputs to figures and tables.

    dlplots qq --in geweke_qq.csv [--in more.csv ...] --out fig.png [--layout 2x3]
    dlplots table --in simtable.csv --out table.md

Consumes only the documented CSV contracts; malformed input exits nonzero
with a message naming the offending line.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .qq import QqCsvError, render_qq
from .tables import TableCsvError, render_table


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dlplots", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qq", help="QQ panel grid from harness quantile CSVs")
    p.add_argument("--in", dest="inputs", type=Path, action="append", required=True,
                   help="input QQ CSV; repeat for a multi-row (per-kernel) grid")
    p.add_argument("--out", type=Path, required=True, help="output PNG path")
    p.add_argument("--layout", default=None,
                   help="grid as ROWSxCOLS, e.g. 2x3 (default: rows of 3 panels, "
                        "or one row per input file)")

    p = sub.add_parser("table", help="markdown/PNG table from the study CSV")
    p.add_argument("--in", dest="inputs", type=Path, action="append", required=True,
                   help="input simtable CSV")
    p.add_argument("--out", type=Path, required=True,
                   help="output path (.md/.txt for markdown, .png for an image)")
    p.add_argument("--layout", default=None, help=argparse.SUPPRESS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "qq":
            result = render_qq(args.inputs, args.out, layout=args.layout)
            print(f"wrote {result.image} ({result.rows}x{result.cols} panels) "
                  f"and {result.data}")
        else:
            if len(args.inputs) != 1:
                print("error: table takes exactly one --in", file=sys.stderr)
                return 2
            out = render_table(args.inputs[0], args.out)
            print(f"wrote {out}")
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QqCsvError, TableCsvError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
