"""Deterministic figures from FDR sweep CSVs."""

__version__ = "0.1.0"

from .render import (
    REQUIRED_COLUMNS,
    AlphaMismatchWarning,
    PlotRequest,
    SchemaError,
    build_figure,
    read_sweep,
    render,
)

__all__ = [
    "__version__",
    "REQUIRED_COLUMNS",
    "AlphaMismatchWarning",
    "PlotRequest",
    "SchemaError",
    "build_figure",
    "read_sweep",
    "render",
]
