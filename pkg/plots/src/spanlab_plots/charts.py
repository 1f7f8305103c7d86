"""Chart rendering over bench CSVs: lines, log-log fits, comparison bars.

This package never recomputes metrics; it only visualizes columns emitted by
the bench CSV (single source of truth upstream).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

SCALES = ("linear", "logx", "logy", "loglog")
KINDS = ("line", "scatter", "bars")

FIGSIZE = (6.4, 4.2)
DPI = 120


class ChartError(ValueError):
    pass


@dataclass
class ChartSpec:
    csv: str
    x: str
    y: str
    out: str
    group: str | None = None
    scale: str = "linear"
    fit: str = "none"         # "none" | "linear" (in the displayed scale)
    kind: str = "line"
    filters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scale not in SCALES:
            raise ChartError(f"unknown scale {self.scale!r}")
        if self.kind not in KINDS:
            raise ChartError(f"unknown kind {self.kind!r}")
        if self.fit not in ("none", "linear"):
            raise ChartError(f"unknown fit {self.fit!r}")


def read_rows(path):
    with open(path, newline="") as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    if not rows:
        raise ChartError(f"no data rows in {path}")
    return rows


def _require_columns(rows, spec):
    have = set(rows[0])
    wanted = {spec.x, spec.y} | set(spec.filters)
    if spec.group:
        wanted.add(spec.group)
    missing = sorted(wanted - have)
    if missing:
        raise ChartError(f"missing columns {missing}; header has {sorted(have)}")


def _apply_filters(rows, filters):
    for col, val in filters.items():
        rows = [r for r in rows if r[col] == val]
    return rows


def _to_float(value, col):
    try:
        return float(value)
    except ValueError:
        raise ChartError(f"column {col!r} has non-numeric value {value!r}")


def _series(rows, spec):
    """(group label -> sorted (x, y) arrays), groups in first-seen order.

    Rows with an empty x or y cell (parameter not applicable) are dropped.
    """
    grouped = {}
    for r in rows:
        if r[spec.x] == "" or r[spec.y] == "":
            continue
        key = r[spec.group] if spec.group else ""
        grouped.setdefault(key, []).append(
            (_to_float(r[spec.x], spec.x), _to_float(r[spec.y], spec.y))
        )
    if not grouped:
        raise ChartError("no rows with usable values after filtering")
    out = {}
    for key, pts in grouped.items():
        pts.sort()
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        out[key] = (xs, ys)
    return out


def _display(values, log):
    return np.log10(values) if log else values


def _fit_slope(xs, ys, scale):
    """Least squares on the displayed scale only."""
    dx = _display(xs, scale in ("logx", "loglog"))
    dy = _display(ys, scale in ("logy", "loglog"))
    if len(dx) < 2 or np.allclose(dx, dx[0]):
        return None
    return float(np.polyfit(dx, dy, 1)[0])


def render(spec):
    """Render the chart; returns the slope-report lines (also printed by the CLI)."""
    rows = read_rows(spec.csv)
    _require_columns(rows, spec)
    rows = _apply_filters(rows, spec.filters)
    if not rows:
        raise ChartError("no rows left after filtering")

    reports = []
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    if spec.kind == "bars":
        labels, values = [], []
        for key, (xs, ys) in _bar_series(rows, spec).items():
            labels.append(key)
            values.append(ys)
        ax.bar(range(len(labels)), values)
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=20, ha="right")
    else:
        logx = spec.scale in ("logx", "loglog")
        logy = spec.scale in ("logy", "loglog")
        for key, (xs, ys) in _series(rows, spec).items():
            label = f"{spec.group}={key}" if spec.group else spec.y
            if spec.kind == "line":
                ax.plot(xs, ys, marker="o", label=label)
            else:
                ax.scatter(xs, ys, label=label)
            if spec.fit == "linear":
                slope = _fit_slope(xs, ys, spec.scale)
                if slope is not None:
                    reports.append(
                        f"slope {spec.y}~{spec.x} [{spec.scale}]"
                        + (f" {spec.group}={key}" if spec.group else "")
                        + f": {slope:.3g}"
                    )
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        if len(ax.get_legend_handles_labels()[0]) > 1:
            ax.legend(fontsize=8)
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    title = f"{spec.y} vs {spec.x}"
    if reports:
        title += "  (" + "; ".join(r.split(": ")[-1] for r in reports) + ")"
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(spec.out, metadata={"Software": "spanlab-plots"})
    plt.close(fig)
    return reports


def _bar_series(rows, spec):
    """Mean of y per x category (bars compare algorithms side by side)."""
    grouped = {}
    for r in rows:
        grouped.setdefault(r[spec.x], []).append(_to_float(r[spec.y], spec.y))
    return {k: (k, float(np.mean(v))) for k, v in grouped.items()}
