"""Offline baselines and competitive-ratio experiment orchestration."""

from __future__ import annotations

import hashlib
import itertools
import math
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .adversary import manhattan_network
from .graphs import (
    STRETCH_RTOL,
    SpannerGraph,
    StretchMonitor,
    max_stretch,
    metrics_report,
    mst_weight,
)
from .greedy import OrderedGreedy
from .gridyao import GridYaoSpanner
from .hst import AlphaRoundedOnline, MultiScaleSpanner
from .instances import InstanceBundle, arrival_order
from .metricspace import L2

# Fixed, versioned column order; the comment line travels with every CSV.
CSV_VERSION_COMMENT = "# spanlab bench csv v1"
CSV_COLUMNS = [
    "instance", "algorithm", "n", "param_eps", "param_t", "param_alpha",
    "edges", "weight", "mst_weight", "lightness", "sparsity", "max_stretch",
    "baseline_mst", "baseline_offline_greedy", "baseline_named",
    "ratio_vs_mst", "ratio_vs_greedy", "ratio_vs_named", "status", "wall_ms",
]

ALGORITHMS = ("alg1", "greedy", "hst", "hst2e")


class StretchViolation(RuntimeError):
    """An online run exceeded its certified stretch bound: a correctness bug."""

    def __init__(self, msg, row=None):
        super().__init__(msg)
        self.row = row


@dataclass
class ExperimentSpec:
    instance: object            # path or InstanceBundle
    algorithm: str
    eps: float | None = None
    t: float | None = None
    alpha: float | None = None
    cadence: str = "final"      # "final" | "every-prefix" | "none"
    baselines: tuple = ("mst", "offline_greedy")
    out: str | None = None
    seed: int | None = None     # arrival-order shuffle seed
    prefix_cap: int = 512


@dataclass
class BenchRow:
    instance: str
    algorithm: str
    n: int
    param_eps: float | None
    param_t: float | None
    param_alpha: float | None
    edges: int | None = None
    weight: float | None = None
    mst_weight: float | None = None
    lightness: float | None = None
    sparsity: float | None = None
    max_stretch: float | None = None
    baseline_mst: float | None = None
    baseline_offline_greedy: float | None = None
    baseline_named: float | None = None
    ratio_vs_mst: float | None = None
    ratio_vs_greedy: float | None = None
    ratio_vs_named: float | None = None
    status: str = "ok"
    wall_ms: float | None = None

    def csv_values(self):
        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, float):
                return f"{x:.12g}"
            return str(x)

        return [fmt(getattr(self, c)) for c in CSV_COLUMNS]


def offline_greedy(metric, t):
    """Classic greedy spanner: all pairs ascending by weight (ties by index pair),
    add iff the current spanner distance exceeds t times the metric distance."""
    if not t > 1.0:
        raise ValueError(f"stretch target must exceed 1, got {t}")
    n = metric.n
    g = SpannerGraph(n)
    if n < 2:
        return g
    d = metric.matrix
    iu, ju = np.triu_indices(n, k=1)
    order = np.lexsort((ju, iu, d[iu, ju]))
    cur = np.full((n, n), math.inf)
    np.fill_diagonal(cur, 0.0)
    for idx in order:
        i, j, w = int(iu[idx]), int(ju[idx]), float(d[iu[idx], ju[idx]])
        if cur[i, j] > t * w:
            g.add_edge(i, j, w)
            through = np.minimum(cur[:, i][:, None] + w + cur[j, :][None, :],
                                 cur[:, j][:, None] + w + cur[i, :][None, :])
            np.minimum(cur, through, out=cur)
            np.minimum(cur, through.T, out=cur)
    return g


def certified_bound(algorithm, eps=None, t=None, alpha=None):
    """The stretch bound the online run is verified against."""
    if algorithm == "alg1":
        return (1.0 + eps) ** 2
    if algorithm == "greedy":
        return t
    if algorithm == "hst":
        return 2.0 * alpha * alpha / (alpha - 1.0)
    if algorithm == "hst2e":
        return 2.0 * (1.0 + 3.0 * eps)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _resolve_instance(spec):
    if isinstance(spec.instance, InstanceBundle):
        bundle = spec.instance
        name = bundle.meta.get("id") or bundle.meta.get("generator") or "inline"
    else:
        from .instances import load_instance

        bundle = load_instance(spec.instance)
        name = str(spec.instance)
    return bundle, name


def _make_state(spec, bundle):
    alg = spec.algorithm
    if alg == "alg1":
        if bundle.kind != "points" or bundle.points.norm != L2:
            raise ValueError("alg1 requires a points instance with norm l2")
        return GridYaoSpanner(bundle.points.dim, spec.eps)
    if alg == "greedy":
        return OrderedGreedy(spec.t)
    if alg == "hst":
        return AlphaRoundedOnline(spec.alpha)
    if alg == "hst2e":
        return MultiScaleSpanner(spec.eps)
    raise ValueError(f"unknown algorithm {alg!r}")


def _named_baseline(bundle, metric):
    meta = bundle.meta
    gen = meta.get("generator")
    if gen == "l1-lattice":
        return manhattan_network(meta["d"], meta["eps"]).total_weight()
    if gen == "girth" and meta.get("star"):
        k = meta["k"]
        return (2.0 * k - 1.0) / 2.0 * (metric.n - 1)
    if gen == "hypercube":
        return math.sqrt(meta["d"]) * (metric.n - 1)  # star through the origin
    return None


def run_experiment(spec, writer=None):
    """Replay the instance through the chosen online algorithm, verify stretch at
    the configured cadence, compute baselines, and emit one row."""
    bundle, name = _resolve_instance(spec)
    n = bundle.n
    if n == 0:
        return []
    if spec.cadence == "every-prefix" and n > spec.prefix_cap:
        raise ValueError(
            f"every-prefix verification capped at n={spec.prefix_cap} (instance has {n})"
        )
    order = arrival_order(bundle, spec.seed)
    metric = bundle.metric().permute(order)
    bound = certified_bound(spec.algorithm, eps=spec.eps, t=spec.t, alpha=spec.alpha)
    state = _make_state(spec, bundle)

    t0 = time.perf_counter()
    pts = bundle.points.asarray()[order] if bundle.kind == "points" else None
    monitor = StretchMonitor(metric) if spec.cadence == "every-prefix" else None
    for i in range(n):
        if spec.algorithm == "alg1":
            new = [(e.u, e.w) for e in state.insert(pts[i])]
        elif spec.algorithm == "hst":
            edge = state.insert(metric.matrix[i, :i])
            new = [(edge[0], edge[2])] if edge else []
        else:
            new = [(u, w) for u, _, w in state.insert(metric.matrix[i, :i])]
        if monitor is not None:
            monitor.add_vertex(new)
            s = monitor.stretch()
            if not s <= bound * (1.0 + STRETCH_RTOL):
                rep = max_stretch(state.graph, metric.prefix(i + 1))
                return _violation_row(spec, name, i + 1, rep, bound, t0, writer)
    row = BenchRow(name, spec.algorithm, n, spec.eps, spec.t, spec.alpha)
    stretch = None
    if spec.cadence in ("final", "every-prefix"):
        stretch = max_stretch(state.graph, metric)
        if not stretch.max_stretch <= bound * (1.0 + STRETCH_RTOL):
            return _violation_row(spec, name, n, stretch, bound, t0, writer)
        row.max_stretch = stretch.max_stretch

    baselines = {}
    if "mst" in spec.baselines:
        baselines["mst"] = mst_weight(metric)[0]
    if "offline_greedy" in spec.baselines:
        baselines["offline_greedy"] = offline_greedy(metric, bound).total_weight()
    named = _named_baseline(bundle, metric)
    if named is not None:
        baselines["named"] = named
    report = metrics_report(state.graph, metric, baselines)

    row.edges = report.edge_count
    row.weight = report.total_weight
    row.mst_weight = report.mst_weight
    row.lightness = report.lightness
    row.sparsity = report.sparsity
    row.baseline_mst = baselines.get("mst")
    row.baseline_offline_greedy = baselines.get("offline_greedy")
    row.baseline_named = named
    row.ratio_vs_mst = report.ratios.get("mst")
    row.ratio_vs_greedy = report.ratios.get("offline_greedy")
    row.ratio_vs_named = report.ratios.get("named")
    row.wall_ms = (time.perf_counter() - t0) * 1000.0
    if writer is not None:
        writer.write_row(row)
    return [row]


def _violation_row(spec, name, n, rep, bound, t0, writer):
    row = BenchRow(
        name, spec.algorithm, n, spec.eps, spec.t, spec.alpha,
        max_stretch=rep.max_stretch, status="stretch_violation",
        wall_ms=(time.perf_counter() - t0) * 1000.0,
    )
    if writer is not None:
        writer.write_row(row)
    raise StretchViolation(
        f"{spec.algorithm} exceeded its bound {bound:.6g}: measured "
        f"{rep.max_stretch:.6g} at witness {rep.witness} (n={n})",
        row=row,
    )


class CsvWriter:
    """Row-at-a-time CSV emission; each row is flushed whole, so a crashed run
    leaves complete rows only."""

    def __init__(self, target):
        self._own = isinstance(target, str) or hasattr(target, "__fspath__")
        self._f = open(target, "w", newline="") if self._own else target
        self._f.write(CSV_VERSION_COMMENT + "\n")
        self._f.write(",".join(CSV_COLUMNS) + "\n")
        self._f.flush()

    def write_row(self, row):
        self._f.write(",".join(row.csv_values()) + "\n")
        self._f.flush()

    def close(self):
        if self._own:
            self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def sweep(template, grid, writer=None):
    """Cross product of grid values, one row per cell, deterministic order;
    duplicate cells are skipped with a warning and failures are recorded."""
    keys = list(grid)
    rows = []
    seen = set()
    for combo in itertools.product(*(grid[k] for k in keys)):
        cell = dict(zip(keys, combo))
        mark = tuple(sorted(cell.items()))
        if mark in seen:
            warnings.warn(f"duplicate grid point skipped: {cell}", stacklevel=2)
            continue
        seen.add(mark)
        spec = replace(template, **cell)
        try:
            rows.extend(run_experiment(spec, writer))
        except StretchViolation as exc:
            rows.append(exc.row)  # already written
        except Exception as exc:  # cell failure: record and continue
            row = BenchRow(
                str(spec.instance), spec.algorithm, -1, spec.eps, spec.t, spec.alpha,
                status=f"error:{type(exc).__name__}",
            )
            if writer is not None:
                writer.write_row(row)
            rows.append(row)
    return rows


def determinism_hash(csv_text):
    """Digest of a bench CSV with the wall-time column blanked."""
    wall_idx = CSV_COLUMNS.index("wall_ms")
    h = hashlib.sha256()
    for line in csv_text.splitlines():
        if line.startswith("#") or not line:
            h.update(line.encode())
            continue
        parts = line.split(",")
        if len(parts) == len(CSV_COLUMNS) and parts[0] != "instance":
            parts[wall_idx] = ""
        h.update(",".join(parts).encode())
        h.update(b"\n")
    return h.hexdigest()
