"""Turn sweep CSVs into the three standard result figures.

Kinds: mse_lines plots the per-method median mse against m from a summary
csv; support_lines plots per-method median support hits against m from a
records csv; mse_box draws one mse box per (method, m) group from a records
csv with whiskers spanning the group minimum and maximum.

Output is PNG at a fixed DPI with versioned metadata, so re-rendering the
same input yields identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__

RECORD_COLUMNS = ("method", "m", "trial_index", "mse", "support_hits",
                  "gen_error", "status", "wall_time")
SUMMARY_COLUMNS = ("method", "m", "min", "q25", "median", "q75", "max", "mean")

MSE_LINES = "mse_lines"
SUPPORT_LINES = "support_lines"
MSE_BOX = "mse_box"
KINDS = (MSE_LINES, SUPPORT_LINES, MSE_BOX)

DPI = 150
_METADATA = {"Software": f"obcs-figures {__version__}"}
_DEFAULT_YLABEL = {
    MSE_LINES: "median mse",
    SUPPORT_LINES: "median support hits",
    MSE_BOX: "mse",
}


class InputSchemaError(ValueError):
    """A CSV whose columns or rows do not match the sweep output schema."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: which csv, which kind, where the PNG goes."""

    input_csv: str | Path
    kind: str
    out_path: str | Path
    xlabel: str = "measurements m"
    ylabel: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InputSchemaError(
                f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not Path(self.input_csv).exists():
            raise FileNotFoundError(f"input csv not found: {self.input_csv}")


def _read(path, columns: tuple[str, ...]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        found = tuple(reader.fieldnames or ())
        if found != columns:
            raise InputSchemaError(
                f"{path}: expected columns {','.join(columns)}, "
                f"found {','.join(found) if found else '(none)'}")
        rows = list(reader)
    if not rows:
        raise InputSchemaError(f"{path}: no data rows")
    return rows


def load_records(path) -> list[dict]:
    """The per-trial rows, with the fields the figures use parsed."""
    return [{"method": r["method"], "m": int(r["m"]), "mse": float(r["mse"]),
             "support_hits": int(r["support_hits"])}
            for r in _read(path, RECORD_COLUMNS)]


def load_summary(path) -> list[dict]:
    return [{"method": r["method"], "m": int(r["m"]),
             "median": float(r["median"])}
            for r in _read(path, SUMMARY_COLUMNS)]


def _methods_of(rows: list[dict]) -> list[str]:
    return sorted({r["method"] for r in rows})


def draw_mse_lines(ax, summary_rows: list[dict]) -> None:
    """One labeled median-mse line per method."""
    for method in _methods_of(summary_rows):
        pts = sorted((r["m"], r["median"]) for r in summary_rows
                     if r["method"] == method)
        ax.plot([m for m, _ in pts], [v for _, v in pts], marker="o",
                label=method)
    if all(r["median"] > 0.0 for r in summary_rows):
        ax.set_yscale("log")
    ax.legend()


def draw_support_lines(ax, records: list[dict]) -> None:
    """One labeled line per method: median support hits at each m."""
    for method in _methods_of(records):
        grid = sorted({r["m"] for r in records if r["method"] == method})
        medians = [float(np.median([r["support_hits"] for r in records
                                    if r["method"] == method and r["m"] == m]))
                   for m in grid]
        ax.plot(grid, medians, marker="o", label=method)
    ax.legend()


def draw_mse_box(ax, records: list[dict]) -> list[dict]:
    """One mse box per (method, m); whiskers are the group min and max.

    Returns the boxplot artist dictionaries, one per method, so callers
    can check what was drawn.
    """
    methods = _methods_of(records)
    grid = sorted({r["m"] for r in records})
    width = 0.8 / len(methods)
    artists = []
    for i, method in enumerate(methods):
        positions, data = [], []
        for g, m in enumerate(grid):
            values = [r["mse"] for r in records
                      if r["method"] == method and r["m"] == m]
            if values:
                positions.append(g + 1 + (i - (len(methods) - 1) / 2) * width)
                data.append(values)
        artists.append(ax.boxplot(data, positions=positions,
                                  widths=width * 0.9, whis=(0, 100),
                                  manage_ticks=False))
    ax.set_xticks(range(1, len(grid) + 1))
    ax.set_xticklabels([str(m) for m in grid])
    return artists


def build_figure(spec: FigureSpec):
    """Load the input and draw it; raises before anything is written."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    try:
        if spec.kind == MSE_LINES:
            draw_mse_lines(ax, load_summary(spec.input_csv))
        elif spec.kind == SUPPORT_LINES:
            draw_support_lines(ax, load_records(spec.input_csv))
        else:
            draw_mse_box(ax, load_records(spec.input_csv))
    except Exception:
        plt.close(fig)
        raise
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel if spec.ylabel is not None
                  else _DEFAULT_YLABEL[spec.kind])
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Write the figure as a PNG and return its path."""
    fig = build_figure(spec)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=DPI, format="png", metadata=dict(_METADATA))
    finally:
        plt.close(fig)
    return out
