"""plotkit: publication-style figure renderer for simulation CSV outputs."""

from .figures import (Curve, EmptyInputError, FigureSpec, PlotkitError,
                      SchemaError, input_checksums, load_spec, plot_isolation,
                      plot_scan, plot_spectrum, read_csv, render)

__version__ = "1.0.0"

__all__ = [
    "Curve",
    "EmptyInputError",
    "FigureSpec",
    "PlotkitError",
    "SchemaError",
    "input_checksums",
    "load_spec",
    "plot_isolation",
    "plot_scan",
    "plot_spectrum",
    "read_csv",
    "render",
]
