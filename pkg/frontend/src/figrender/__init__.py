"""Offline figure renderer for experiment CSVs.

Reads the CSV files written by the ``filtermix`` experiment runner and
renders them to publication-style SVG + PNG figures.  Presentation only: no
science is recomputed here — the renderer's entire contract is column
selection, axis scaling, and styling of values exactly as they appear
in the CSV.
"""

from .render import (
    KINDS,
    FigureSpec,
    RenderError,
    default_kinds,
    default_series,
    read_table,
    render,
)

__all__ = [
    "KINDS",
    "FigureSpec",
    "RenderError",
    "default_kinds",
    "default_series",
    "read_table",
    "render",
]
