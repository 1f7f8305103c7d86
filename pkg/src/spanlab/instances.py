"""Instance files, spanner CSV, schedule sidecars, and report JSON."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graphs import SpannerGraph
from .hst import HstTree
from .metricspace import NORMS, FiniteMetric, PointSequence


@dataclass
class InstanceBundle:
    """A self-describing instance: points, a distance matrix, or an HST."""

    kind: str
    points: PointSequence | None = None
    matrix: np.ndarray | None = None
    tree: HstTree | None = None
    meta: dict = field(default_factory=dict)
    schedule: list | None = None

    @property
    def n(self):
        if self.kind == "points":
            return len(self.points)
        if self.kind == "matrix":
            return len(self.matrix)
        return self.tree.n

    def metric(self):
        if self.kind == "points":
            return self.points.to_metric()
        if self.kind == "matrix":
            return FiniteMetric(self.matrix)
        return self.tree.metric()

    def to_dict(self):
        if self.kind == "points":
            d = {
                "kind": "points",
                "dim": self.points.dim,
                "norm": self.points.norm,
                "points": [list(p) for p in self.points],
            }
        elif self.kind == "matrix":
            d = {"kind": "matrix", "dist": [list(map(float, row)) for row in self.matrix]}
        elif self.kind == "hst":
            d = {"kind": "hst", "tree": self.tree.to_dict()}
        else:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if self.meta:
            d["meta"] = self.meta
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind")
        meta = d.get("meta", {})
        if kind == "points":
            norm = d.get("norm", "l2")
            if norm not in NORMS:
                raise ValueError(f"unknown norm {norm!r}")
            seq = PointSequence(dim=int(d["dim"]), norm=norm, points=d["points"])
            return cls("points", points=seq, meta=meta)
        if kind == "matrix":
            return cls("matrix", matrix=np.asarray(d["dist"], dtype=float), meta=meta)
        if kind == "hst":
            return cls("hst", tree=HstTree.from_dict(d["tree"]), meta=meta)
        raise ValueError(f"unknown instance kind {kind!r}")


def schedule_sidecar_path(instance_path):
    p = Path(instance_path)
    return p.with_name(p.stem + ".schedule.json")


def save_instance(bundle, path):
    path = Path(path)
    path.write_text(json.dumps(bundle.to_dict()) + "\n")
    if bundle.schedule is not None:
        sidecar = schedule_sidecar_path(path)
        sidecar.write_text(json.dumps({str(i): s for i, s in enumerate(bundle.schedule)}) + "\n")


def load_instance(path):
    path = Path(path)
    bundle = InstanceBundle.from_dict(json.loads(path.read_text()))
    sidecar = schedule_sidecar_path(path)
    if sidecar.exists():
        raw = json.loads(sidecar.read_text())
        bundle.schedule = [raw[str(i)] for i in range(bundle.n)]
    return bundle


def arrival_order(bundle, shuffle_seed=None):
    """Presentation order: file order, reordered by the schedule sidecar when
    present; --shuffle permutes reproducibly."""
    order = list(range(bundle.n))
    if bundle.schedule is not None:
        order.sort(key=lambda i: (bundle.schedule[i], i))
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(order)
    return order


def write_spanner_csv(graph, target):
    """Spanner CSV: header u,v,w then one row per edge in addition order."""
    own = isinstance(target, (str, Path))
    f = open(target, "w", newline="") if own else target
    try:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["u", "v", "w"])
        for u, v, wt in graph.edges:
            w.writerow([u, v, f"{wt:.12g}"])
    finally:
        if own:
            f.close()


def read_spanner_csv(path, vertices=None):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["u", "v", "w"]:
        raise ValueError("expected a spanner CSV with header u,v,w")
    edges = [(int(u), int(v), float(w)) for u, v, w in rows[1:]]
    n = vertices if vertices is not None else (max((max(u, v) for u, v, _ in edges), default=-1) + 1)
    g = SpannerGraph(n)
    for u, v, w in edges:
        g.add_edge(u, v, w)
    return g


def spanner_rows_json(graph):
    return [{"u": u, "v": v, "w": w} for u, v, w in graph.edges]


def report_to_dict(report, stretch=None):
    d = {
        "total_weight": report.total_weight,
        "mst_weight": report.mst_weight,
        "lightness": report.lightness,
        "edge_count": report.edge_count,
        "sparsity": report.sparsity,
        "baselines": report.baselines,
        "ratios": report.ratios,
    }
    if stretch is not None:
        d["max_stretch"] = stretch.max_stretch
        d["connected"] = stretch.connected
        d["witness"] = list(stretch.witness) if stretch.witness else None
    return d


def write_report_json(report, target, stretch=None):
    payload = json.dumps(report_to_dict(report, stretch), indent=2) + "\n"
    if isinstance(target, (str, Path)):
        Path(target).write_text(payload)
    elif isinstance(target, io.TextIOBase) or hasattr(target, "write"):
        target.write(payload)
    else:
        raise TypeError("target must be a path or a writable stream")
