"""qchan-plots render CSV OUT [--format svg|png]"""

from __future__ import annotations

import argparse
import sys

from . import FigureFormatError, render

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def main(argv=None) -> int:
    parser = _Parser(prog="qchan-plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p_render = sub.add_parser("render", help="render one figure CSV to an image")
    p_render.add_argument("csv")
    p_render.add_argument("out")
    p_render.add_argument("--format", choices=("svg", "png"), default="svg")
    args = parser.parse_args(argv)

    try:
        report = render(args.csv, args.out, args.format)
    except FigureFormatError as exc:
        print(f"qchan-plots: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"qchan-plots: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(
        f"figure {report.figure_id}: {report.curve_points} curve points, "
        f"{report.model_points} model points"
        + (f", {report.flagged} FLAGGED" if report.flagged else "")
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
