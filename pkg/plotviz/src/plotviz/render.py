"""Render an FDR sweep CSV as a publication-style figure.

Input is the sweep schema produced by the simulation lab: one row per
n with the estimated mean FDP, its confidence band, and the exact
procedure parameters as fraction strings. The consumer side of that
contract is declared here independently; nothing is imported from the
producer.

Rendering is deterministic: identical input yields byte-identical
output. That means object-level matplotlib (no pyplot state), a fixed
style table, and scrubbed format metadata (the PNG Software chunk, the
SVG date and id salt, the PDF creation date).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

__all__ = [
    "REQUIRED_COLUMNS",
    "STYLE",
    "SchemaError",
    "AlphaMismatchWarning",
    "PlotRequest",
    "read_sweep",
    "build_figure",
    "render",
]

# The sweep CSV contract this package consumes.
REQUIRED_COLUMNS = [
    "n",
    "trials",
    "alpha",
    "c",
    "t",
    "a",
    "b",
    "mean_fdp",
    "std_err",
    "ci_low",
    "ci_high",
    "p_hit_end",
    "z_hat",
    "mean_K",
    "seed",
]

# Style table: every visual constant of the figure lives here.
STYLE = {
    "figsize": (7.0, 4.2),
    "dpi": 150,
    "mean_color": "#1f5fa8",
    "mean_linewidth": 1.6,
    "band_color": "#1f5fa8",
    "band_alpha": 0.25,
    "target_color": "#c23b22",
    "target_linestyle": "--",
    "target_linewidth": 1.2,
    "marker": "o",
    "marker_size": 3.5,
    "grid_alpha": 0.3,
    "label_fontsize": 11,
    "title_fontsize": 12,
    "svg_hashsalt": "plotviz",
}


class SchemaError(ValueError):
    """The CSV does not carry the sweep schema this package consumes."""


class AlphaMismatchWarning(UserWarning):
    """The requested target line differs from the alpha in the CSV."""


@dataclass(frozen=True)
class PlotRequest:
    """What to draw and where to put it.

    alpha_line overrides the target line's height (defaults to the
    alpha recorded in the CSV); y_limits pins the y axis when given.
    """

    csv_path: str | Path
    out_path: str | Path
    title: str | None = None
    alpha_line: Fraction | None = None
    y_limits: tuple[float, float] | None = None


def read_sweep(path) -> list[dict]:
    """Parse a sweep CSV, enforcing the schema.

    Raises SchemaError naming every missing column; extra columns are
    tolerated and ignored.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        missing = [col for col in REQUIRED_COLUMNS if col not in names]
        if missing:
            raise SchemaError(
                f"sweep CSV is missing required columns: {', '.join(missing)}"
            )
        rows = []
        for rec in reader:
            rows.append(
                {
                    "n": int(rec["n"]),
                    "trials": int(rec["trials"]),
                    "alpha": Fraction(rec["alpha"]),
                    "c": Fraction(rec["c"]),
                    "t": Fraction(rec["t"]),
                    "a": int(rec["a"]),
                    "b": int(rec["b"]),
                    "mean_fdp": float(rec["mean_fdp"]),
                    "std_err": float(rec["std_err"]),
                    "ci_low": float(rec["ci_low"]),
                    "ci_high": float(rec["ci_high"]),
                    "p_hit_end": float(rec["p_hit_end"]),
                    "z_hat": float(rec["z_hat"]),
                    "mean_K": float(rec["mean_K"]),
                    "seed": int(rec["seed"]),
                }
            )
    if not rows:
        raise SchemaError("sweep CSV has a header but no data rows")
    for key in ("alpha", "c", "t", "a", "b"):
        values = {row[key] for row in rows}
        if len(values) > 1:
            raise SchemaError(
                f"sweep CSV mixes parameter values in column {key!r}: "
                f"{sorted(map(str, values))}"
            )
    return sorted(rows, key=lambda row: row["n"])


def _frac_label(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def build_figure(request: PlotRequest) -> tuple[Figure, list[dict]]:
    """Build the figure without writing it; tests introspect the result."""
    rows = read_sweep(request.csv_path)
    csv_alpha = rows[0]["alpha"]
    alpha = request.alpha_line if request.alpha_line is not None else csv_alpha
    if request.alpha_line is not None and request.alpha_line != csv_alpha:
        warnings.warn(
            f"requested target line {request.alpha_line} differs from the "
            f"CSV's alpha {csv_alpha}; drawing the requested value",
            AlphaMismatchWarning,
            stacklevel=2,
        )

    ns = [row["n"] for row in rows]
    means = [row["mean_fdp"] for row in rows]

    fig = Figure(figsize=STYLE["figsize"], dpi=STYLE["dpi"])
    ax = fig.add_subplot()
    if len(rows) == 1:
        # A single grid point has no trend to draw; show the estimate
        # with its interval as an error bar.
        row = rows[0]
        yerr = [[row["mean_fdp"] - row["ci_low"]], [row["ci_high"] - row["mean_fdp"]]]
        ax.errorbar(
            ns,
            means,
            yerr=yerr,
            fmt=STYLE["marker"],
            color=STYLE["mean_color"],
            markersize=STYLE["marker_size"] + 1.5,
            capsize=4,
            label="mean FDP",
        )
    else:
        ax.fill_between(
            ns,
            [row["ci_low"] for row in rows],
            [row["ci_high"] for row in rows],
            color=STYLE["band_color"],
            alpha=STYLE["band_alpha"],
            linewidth=0,
            label="99% interval",
        )
        ax.plot(
            ns,
            means,
            color=STYLE["mean_color"],
            linewidth=STYLE["mean_linewidth"],
            marker=STYLE["marker"],
            markersize=STYLE["marker_size"],
            label="mean FDP",
        )
    ax.axhline(
        float(alpha),
        color=STYLE["target_color"],
        linestyle=STYLE["target_linestyle"],
        linewidth=STYLE["target_linewidth"],
        label=f"alpha = {_frac_label(alpha)}",
    )
    ax.set_xlabel("n", fontsize=STYLE["label_fontsize"])
    ax.set_ylabel("empirical FDR", fontsize=STYLE["label_fontsize"])
    if request.y_limits is not None:
        ax.set_ylim(*request.y_limits)
    row0 = rows[0]
    title = request.title or (
        f"alpha = {_frac_label(row0['alpha'])}, c = {_frac_label(row0['c'])}, "
        f"t = {_frac_label(row0['t'])}"
    )
    ax.set_title(title, fontsize=STYLE["title_fontsize"])
    ax.grid(True, alpha=STYLE["grid_alpha"])
    ax.legend(loc="best", fontsize=STYLE["label_fontsize"] - 1)
    fig.tight_layout()
    return fig, rows


# metadata keys set to None strip the default timestamp/tool stamps
_SCRUB = {
    ".png": {"Software": None},
    ".svg": {"Date": None},
    ".pdf": {"CreationDate": None},
}


def render(request: PlotRequest) -> Path:
    """Render the request to its output path and return that path."""
    out = Path(request.out_path)
    suffix = out.suffix.lower()
    if suffix not in _SCRUB:
        raise ValueError(
            f"unsupported output format {suffix or '(none)'}; use .png, .svg, or .pdf"
        )
    fig, _ = build_figure(request)
    with matplotlib.rc_context({"svg.hashsalt": STYLE["svg_hashsalt"]}):
        fig.savefig(out, format=suffix[1:], metadata=_SCRUB[suffix])
    return out
