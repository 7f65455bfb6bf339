"""Render benchmark CSVs into paper-style figures.

Heatmaps place the outlier ratio on the horizontal axis and the relative
subspace dimension d/D on the vertical axis, one cell per grid point,
averaging the plotted metric over trials. The grayscale convention is
white = success (or 90 degrees) and black = failure (0 degrees). ROC
overlays plot one curve per method, annotated with the area above the
curve.

Rendering is a pure function of the input CSV: the style is pinned and
volatile metadata (dates, hash salts) is fixed, so identical inputs
produce identical image bytes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

KINDS = ("heatmap-separation", "heatmap-condition", "heatmap-angle", "roc-overlay")

_STYLE = {
    "figure.figsize": (4.0, 3.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "svg.hashsalt": "dpcp-figures",
    "svg.fonttype": "none",  # keep annotations as searchable text
}

_METRIC = {
    "heatmap-separation": ("separation", 0.0, 1.0),
    "heatmap-condition": ("condition_holds", 0.0, 1.0),
    "heatmap-angle": ("phi0_star", 0.0, 90.0),
}


class SchemaError(ValueError):
    """The CSV is missing a column the figure kind requires."""


@dataclass
class FigureSpec:
    input_csv: str
    kind: str
    output: str
    filters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def _require(df: pd.DataFrame, column: str) -> None:
    if column not in df.columns:
        raise SchemaError(f"missing column: {column}")


def _apply_filters(df: pd.DataFrame, filters: dict) -> pd.DataFrame:
    for col, value in filters.items():
        _require(df, col)
        series = df[col]
        if pd.api.types.is_numeric_dtype(series):
            mask = np.isclose(series.astype(float), float(value))
        else:
            mask = series.astype(str) == str(value)
        df = df[mask]
    return df


def _with_ratio(df: pd.DataFrame) -> pd.DataFrame:
    if "ratio" in df.columns:
        return df
    _require(df, "M")
    _require(df, "N")
    df = df.copy()
    df["ratio"] = (df["M"] / (df["M"] + df["N"])).round(6)
    return df


def heatmap_matrix(df: pd.DataFrame, kind: str, filters: dict | None = None):
    """Cell matrix for a heatmap kind: rows indexed by d/D ascending,
    columns by outlier ratio ascending, values averaged over whatever
    rows remain after filtering (trials, typically)."""
    metric, _, _ = _METRIC[kind]
    df = _apply_filters(df, filters or {})
    df = _with_ratio(df)
    for col in ("D", "d", metric):
        _require(df, col)
    if df.empty:
        raise SchemaError("no rows left after filtering")
    df = df.copy()
    df["rel_dim"] = (df["d"] / df["D"]).round(6)
    table = df.pivot_table(index="rel_dim", columns="ratio", values=metric,
                           aggfunc="mean")
    table = table.sort_index(axis=0).sort_index(axis=1)
    return table.to_numpy(dtype=float), list(table.index), list(table.columns)


def _save(fig, output: str) -> list[str]:
    stem, ext = os.path.splitext(output)
    if ext.lower() not in (".png", ".svg"):
        stem = output
    paths = [stem + ".png", stem + ".svg"]
    fig.savefig(paths[0], metadata={"Software": "dpcp-figures"})
    fig.savefig(paths[1], metadata={"Date": None})
    plt.close(fig)
    return paths


def _render_heatmap(df: pd.DataFrame, spec: FigureSpec) -> list[str]:
    matrix, rows, cols = heatmap_matrix(df, spec.kind, spec.filters)
    _, vmin, vmax = _METRIC[spec.kind]
    fig, ax = plt.subplots()
    ax.imshow(matrix, cmap="gray", vmin=vmin, vmax=vmax, origin="lower",
              aspect="auto", interpolation="nearest")
    ax.set_xticks(range(len(cols)), [f"{c:g}" for c in cols])
    ax.set_yticks(range(len(rows)), [f"{r:g}" for r in rows])
    ax.set_xlabel("outlier ratio M/(N+M)")
    ax.set_ylabel("relative dimension d/D")
    titles = {"heatmap-separation": "perfect separation rate",
              "heatmap-condition": "sufficient condition rate",
              "heatmap-angle": "minimum initialization angle (deg)"}
    ax.set_title(titles[spec.kind])
    fig.tight_layout()
    return _save(fig, spec.output)


def _render_roc(df: pd.DataFrame, spec: FigureSpec) -> list[str]:
    df = _apply_filters(df, spec.filters)
    for col in ("method", "fpr", "tpr", "area_above"):
        _require(df, col)
    if df.empty:
        raise SchemaError("no rows left after filtering")
    fig, ax = plt.subplots()
    for method, group in df.groupby("method", sort=True):
        area = float(group["area_above"].iloc[0])
        ax.plot(group["fpr"].to_numpy(), group["tpr"].to_numpy(),
                label=f"{method} ({area:.3f})")
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.legend(loc="lower right", title="area above curve")
    fig.tight_layout()
    return _save(fig, spec.output)


def render(spec: FigureSpec) -> list[str]:
    """Render one figure; returns the written file paths (PNG and SVG)."""
    df = pd.read_csv(spec.input_csv)
    with matplotlib.rc_context(_STYLE):
        if spec.kind == "roc-overlay":
            return _render_roc(df, spec)
        return _render_heatmap(df, spec)
