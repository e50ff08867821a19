"""``render`` command: one sweep CSV in, one figure file out."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, FigureRequest, PlotError, load_table, render

# Series drawn by default when none are requested, per figure family; only
# columns actually present in the CSV are used.
DEFAULT_SERIES = {
    "counts_vs_distance": ("E_S", "E_M", "E_T", "E_S_mc", "E_M_mc", "E_T_mc"),
    "pe_vs_threshold": ("pe0", "pe1", "pe", "pe0_mc", "pe1_mc", "pe_mc"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="Render a figure from a mcvdlink sweep CSV."
    )
    parser.add_argument("--csv", required=True, help="input CSV path")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--series",
        help="comma-separated column names (default: the kind's known columns)",
    )
    return parser


def pick_series(kind: str, series_arg, csv_path: str) -> tuple:
    if series_arg:
        return tuple(name.strip() for name in series_arg.split(",") if name.strip())
    header, _ = load_table(csv_path)
    present = tuple(name for name in DEFAULT_SERIES[kind] if name in header)
    if not present:
        raise PlotError(
            f"none of the default {kind} columns are present; use --series "
            f"(CSV has: {', '.join(header)})"
        )
    return present


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        series = pick_series(args.kind, args.series, args.csv)
        render(
            FigureRequest(
                csv_path=args.csv,
                figure_kind=args.kind,
                series_keys=series,
                out_path=args.out,
            )
        )
    except PlotError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
