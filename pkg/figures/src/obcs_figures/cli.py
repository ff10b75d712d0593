"""Command line entry point: render one figure from sweep CSVs."""

from __future__ import annotations

import argparse
import sys

from .rendering import KINDS, MSE_LINES, FigureSpec, render


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a PNG figure from sweep result CSVs.")
    parser.add_argument("--records", help="per-trial records csv")
    parser.add_argument("--summary", help="aggregated summary csv")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--xlabel", default="measurements m")
    parser.add_argument("--ylabel", default=None)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    source = "summary" if args.kind == MSE_LINES else "records"
    input_csv = getattr(args, source)
    if input_csv is None:
        print(f"error: --{source} is required for kind {args.kind}",
              file=sys.stderr)
        return 2
    try:
        out = render(FigureSpec(input_csv=input_csv, kind=args.kind,
                                out_path=args.out, xlabel=args.xlabel,
                                ylabel=args.ylabel))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
