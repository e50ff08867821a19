"""CSV-to-figure rendering.

The first CSV column is the sweep axis; requested series columns become
either solid lines (analytic quantities) or markers with error bars (columns
ending in ``_mc``, paired with their standard-error column, drawn at 3 sigma).
Cells that are not numbers (``ERR:<code>`` or blanks) become gaps. Output is
deterministic: fixed style, no embedded timestamps.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIGURE_KINDS = ("counts_vs_distance", "pe_vs_threshold")

# Error-bar column paired with each Monte Carlo series.
SE_COLUMN = {
    "pe0_mc": "se0",
    "pe1_mc": "se1",
    "pe_mc": "se",
    "E_S_mc": "se_S",
    "E_M_mc": "se_M",
    "E_T_mc": "se_T",
}

# Probabilities below the resolution of a 1e5-trial run are noise; the pe
# axes are clipped here rather than the data being altered.
PE_FLOOR = 1e-6

AXIS_LABELS = {
    "r_d": "tagged transmitter distance r_d (um)",
    "eta": "decision threshold",
    "lambda": "interferer intensity (1/um^3)",
    "Ts": "slot duration (s)",
    "mu": "degradation rate (1/s)",
    "t": "time (s)",
}


class PlotError(Exception):
    """Base error for figure rendering."""


class MissingColumnError(PlotError):
    def __init__(self, wanted, available):
        super().__init__(f"column {wanted!r} not in CSV; available: {', '.join(available)}")
        self.wanted = wanted
        self.available = tuple(available)


class EmptyDataError(PlotError):
    """The CSV has a header but no data rows."""


@dataclass(frozen=True)
class FigureRequest:
    """One figure: source CSV, figure family, series columns, output path."""

    csv_path: str
    figure_kind: str
    series_keys: tuple
    out_path: str

    def __post_init__(self):
        if self.figure_kind not in FIGURE_KINDS:
            raise PlotError(
                f"figure_kind must be one of {FIGURE_KINDS}, got {self.figure_kind!r}"
            )
        if not self.series_keys:
            raise PlotError("at least one series column is required")
        object.__setattr__(self, "series_keys", tuple(self.series_keys))


def load_table(csv_path: str):
    """Read the CSV into ``(header, columns)`` with non-numeric cells as NaN."""
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataError(f"{csv_path} has no header row") from None
        rows = [row for row in reader if row]
    if not rows:
        raise EmptyDataError(f"{csv_path} contains a header but no data rows")
    columns = {name: [] for name in header}
    for row in rows:
        for name, cell in zip(header, row):
            try:
                columns[name].append(float(cell))
            except ValueError:
                columns[name].append(math.nan)
    return header, columns


def _column(columns, header, name):
    if name not in columns:
        raise MissingColumnError(name, header)
    return columns[name]


def render(req: FigureRequest):
    """Draw the requested figure, write ``out_path`` and return the Figure.

    The output format follows the ``out_path`` extension (anything the
    matplotlib Agg backend supports: png, pdf, svg, ...). Nothing is written
    when the CSV is empty or a column is missing.
    """
    header, columns = load_table(req.csv_path)
    x_name = header[0]
    x = _column(columns, header, x_name)

    series = []
    for key in req.series_keys:
        values = _column(columns, header, key)
        se_name = SE_COLUMN.get(key)
        se = _column(columns, header, se_name) if se_name else None
        series.append((key, values, se))

    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=120)
    for key, values, se in series:
        if se is not None:
            ax.errorbar(
                x,
                values,
                yerr=[3.0 * s for s in se],
                fmt="o",
                markersize=4.5,
                capsize=2.5,
                linestyle="none",
                label=key,
            )
        else:
            ax.plot(x, values, "-", linewidth=1.6, label=key)

    ax.set_xlabel(AXIS_LABELS.get(x_name, x_name))
    if req.figure_kind == "pe_vs_threshold":
        ax.set_yscale("log")
        ax.set_ylim(bottom=PE_FLOOR)
        ax.set_ylabel("probability of bit error")
    else:
        ax.set_ylabel("expected absorbed molecules per slot")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(req.out_path, metadata=_scrubbed_metadata(req.out_path))
    return fig


def _scrubbed_metadata(out_path: str):
    """Keep output byte-stable: strip the date fields some formats embed."""
    ext = os.path.splitext(out_path)[1].lower()
    if ext == ".svg":
        return {"Date": None}
    if ext == ".pdf":
        return {"CreationDate": None}
    return None
