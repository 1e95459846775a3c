"""Figure rendering for experiment CSVs.

Pure presentation: each figure kind declares which column is the x axis,
which columns it plots by default, and how the axes are scaled and
labeled.  Values are drawn exactly as they appear in the CSV — the only
transformations are axis scalings (log x for intensity sweeps, log y for
raw EMSE magnitudes); dB columns are already dB in the data.

Every render writes the same figure twice, as SVG (vector) and PNG
(raster), and is byte-deterministic for identical inputs: both writers
run with pinned DPI and hash salt and with the volatile metadata fields
(creation date, software version) removed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["KINDS", "FigureSpec", "RenderError", "default_kinds",
           "default_series", "read_table", "render"]


class RenderError(ValueError):
    """A figure could not be produced from the given CSV and options."""


@dataclass(frozen=True)
class KindSpec:
    """Presentation recipe: x-axis choice, default series, axis styling."""

    x_candidates: tuple[str, ...]
    series_prefixes: tuple[str, ...]
    xlabel: str
    ylabel: str
    log_y: bool = False
    markers: bool = False


# Column names follow the experiment CSV schemas: *_db columns hold
# decibel values, `trq` is the random-walk intensity Tr(Q), `n` is the
# sample index.  The x axis goes log-scale whenever it is `trq`.
KINDS: dict[str, KindSpec] = {
    "nsd-sweep": KindSpec(
        ("trq",), ("nsd_",), "random-walk intensity Tr(Q)",
        "EMSE degradation over tuned reference (dB)", markers=True),
    "emse-sweep": KindSpec(
        ("trq",), ("zeta_",), "random-walk intensity Tr(Q)",
        "steady-state EMSE", log_y=True, markers=True),
    "lambda-sweep": KindSpec(
        ("trq", "alpha"), ("lambda",), "sweep point",
        "mixing weight", markers=True),
    "mixture-margin": KindSpec(
        ("alpha",), ("margin",), "difficulty mix alpha",
        "mixture gain over best member (dB)", markers=True),
    "emse-trace": KindSpec(
        ("n",), ("emse_",), "sample index n", "EMSE (dB)"),
    "lambda-trace": KindSpec(
        ("n",), ("lambda",), "sample index n", "mixing weight"),
    "msd-trace": KindSpec(
        ("n",), ("msd_",), "sample index n", "MSD (dB)"),
    "erle-trace": KindSpec(
        ("n",), ("erle_",), "sample index n", "ERLE (dB)"),
    "wordlength": KindSpec(
        ("bits",), ("degradation",), "difference-register fraction bits",
        "EMSE change vs full precision (dB)", markers=True),
}

# Deterministic, self-contained output: fixed dpi, stable SVG ids, no
# environment-dependent font fallbacks beyond matplotlib's bundled set.
_RC = {
    "figure.figsize": (7.0, 4.4),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "svg.hashsalt": "figrender",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.axisbelow": True,
    "lines.linewidth": 1.6,
    "legend.framealpha": 0.9,
    "path.simplify": False,
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure: input CSV, presentation kind, output base path.

    ``series`` selects the columns to plot (default: the kind's own
    selection); ``xlabel``/``ylabel`` override the kind's axis labels.
    The output is written as ``out`` with both ``.svg`` and ``.png``
    suffixes.
    """

    csv: Path
    kind: str
    out: Path
    series: tuple[str, ...] | None = None
    xlabel: str | None = None
    ylabel: str | None = None


def read_table(path) -> tuple[list[str], list[list[str]]]:
    """Header and data rows of a CSV; errors on empty or headerless files."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise RenderError(f"{path}: empty CSV")
    header, data = rows[0], rows[1:]
    if not data:
        raise RenderError(f"{path}: no data rows")
    return header, data


def default_series(kind: str, header: list[str]) -> list[str]:
    """The columns a kind plots when no explicit selection is given."""
    spec = _kind(kind)
    return [c for c in header
            if any(c.startswith(p) for p in spec.series_prefixes)]


def default_kinds(header: list[str]) -> list[str]:
    """Every kind that can render a CSV with this header as-is."""
    return [name for name, spec in KINDS.items()
            if any(x in header for x in spec.x_candidates)
            and default_series(name, header)]


def _kind(kind: str) -> KindSpec:
    try:
        return KINDS[kind]
    except KeyError:
        known = ", ".join(sorted(KINDS))
        raise RenderError(f"unknown figure kind {kind!r} (known: {known})") from None


def _column(header, data, name, path):
    try:
        i = header.index(name)
    except ValueError:
        raise RenderError(f"{path}: column {name!r} not in header {header}") from None
    try:
        return [float(row[i]) for row in data]
    except (ValueError, IndexError) as exc:
        raise RenderError(f"{path}: column {name!r} is not numeric: {exc}") from None


def _legend_label(column: str) -> str:
    stem = column[:-3] if column.endswith("_db") else column
    return stem.replace("_", " ")


def render(spec: FigureSpec) -> tuple[Path, Path]:
    """Render one figure; returns the (svg_path, png_path) written."""
    kind = _kind(spec.kind)
    header, data = read_table(spec.csv)
    x_col = next((c for c in kind.x_candidates if c in header), None)
    if x_col is None:
        raise RenderError(
            f"{spec.csv}: kind {spec.kind!r} needs one of {kind.x_candidates} "
            f"in header {header}")
    series = list(spec.series) if spec.series is not None else \
        default_series(spec.kind, header)
    if not series:
        raise RenderError(
            f"{spec.csv}: empty series selection for kind {spec.kind!r}")
    x = _column(header, data, x_col, spec.csv)
    columns = {name: _column(header, data, name, spec.csv) for name in series}

    out = Path(spec.out)
    if out.suffix in (".svg", ".png"):
        out = out.with_suffix("")
    out.parent.mkdir(parents=True, exist_ok=True)
    svg_path, png_path = out.with_suffix(".svg"), out.with_suffix(".png")

    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        marker = "o" if kind.markers else None
        for name, values in columns.items():
            ax.plot(x, values, marker=marker, markersize=4,
                    label=_legend_label(name))
        if x_col == "trq":
            ax.set_xscale("log")
        if kind.log_y:
            ax.set_yscale("log")
        ax.set_xlabel(spec.xlabel if spec.xlabel is not None else kind.xlabel)
        ax.set_ylabel(spec.ylabel if spec.ylabel is not None else kind.ylabel)
        ax.set_title(Path(spec.csv).stem)
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        fig.savefig(png_path, format="png", metadata={"Software": None})
        plt.close(fig)
    return svg_path, png_path
