"""Figure rendering for mcvdlink sweep CSVs.

Draws the two figure families the sweep CLI produces data for: expected
molecule counts versus tagged distance, and error probability versus decision
threshold (analytic curves as solid lines, Monte Carlo estimates as markers
with 3-sigma error bars). This package never recomputes model quantities; it
plots exactly the numbers found in the CSV.
"""

from .render import (
    EmptyDataError,
    FigureRequest,
    MissingColumnError,
    PlotError,
    load_table,
    render,
)

__version__ = "0.1.0"
