"""Spanner graphs and the exact verifiers: shortest paths, MST, stretch, reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

STRETCH_RTOL = 1e-9  # relative slack for all stretch-bound comparisons


class SpannerError(ValueError):
    pass


class SpannerGraph:
    """Append-only weighted edge list over a growing vertex set.

    Edges are never removed or reweighted; the edge list doubles as the
    audit log of additions.
    """

    def __init__(self, vertices=0):
        self.vertices = int(vertices)
        self.edges = []  # (u, v, w) in addition order
        self._pairs = set()

    def add_vertices(self, count=1):
        self.vertices += count

    def ensure_vertices(self, n):
        if n > self.vertices:
            self.vertices = n

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self._pairs

    def _check(self, u, v, w):
        if u == v:
            raise SpannerError(f"self-loop at {u}")
        if not (0 <= u < self.vertices and 0 <= v < self.vertices):
            raise SpannerError(f"endpoint out of range: ({u}, {v})")
        if not (w >= 0.0 and math.isfinite(w)):
            raise SpannerError(f"bad edge weight {w!r}")

    def add_edge(self, u, v, w):
        self._check(u, v, w)
        key = (min(u, v), max(u, v))
        if key in self._pairs:
            raise SpannerError(f"duplicate edge {key}")
        self._pairs.add(key)
        self.edges.append((u, v, float(w)))

    def add_edge_if_new(self, u, v, w):
        """Add unless the unordered pair is already present; first addition wins."""
        self._check(u, v, w)
        key = (min(u, v), max(u, v))
        if key in self._pairs:
            return False
        self._pairs.add(key)
        self.edges.append((u, v, float(w)))
        return True

    @property
    def edge_count(self):
        return len(self.edges)

    def total_weight(self):
        return float(sum(w for _, _, w in self.edges))

    def adjacency(self):
        adj = [[] for _ in range(self.vertices)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def to_csr(self):
        n = self.vertices
        if not self.edges:
            return csr_matrix((n, n))
        us = np.fromiter((e[0] for e in self.edges), int, len(self.edges))
        vs = np.fromiter((e[1] for e in self.edges), int, len(self.edges))
        ws = np.fromiter((e[2] for e in self.edges), float, len(self.edges))
        return csr_matrix(
            (np.concatenate([ws, ws]), (np.concatenate([us, vs]), np.concatenate([vs, us]))),
            shape=(n, n),
        )

    def is_connected(self):
        n = self.vertices
        if n <= 1:
            return True
        adj = self.adjacency()
        seen = [False] * n
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            x = stack.pop()
            for y, _ in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    count += 1
                    stack.append(y)
        return count == n


def shortest_path_distances(graph, source):
    """Exact single-source shortest-path distances; unreachable entries are +inf."""
    if not 0 <= source < graph.vertices:
        raise SpannerError(f"source {source} out of range")
    if graph.vertices == 0:
        return np.zeros(0)
    return dijkstra(graph.to_csr(), directed=False, indices=source)


def all_pairs_distances(graph):
    if graph.vertices == 0:
        return np.zeros((0, 0))
    return dijkstra(graph.to_csr(), directed=False)


@dataclass
class StretchReport:
    max_stretch: float
    witness: tuple | None
    connected: bool


def max_stretch(graph, metric):
    """Worst-case distortion of the spanner against the metric.

    Pairs at metric distance zero (duplicate points) are skipped in the
    ratios; any unreachable pair makes the report disconnected/(+inf).
    """
    n = metric.n
    if graph.vertices != n:
        raise SpannerError(f"vertex count {graph.vertices} != metric size {n}")
    if n <= 1:
        return StretchReport(1.0, None, True)
    dg = all_pairs_distances(graph)
    d = metric.matrix
    pos = ~np.eye(n, dtype=bool) & (d > 0.0)  # zero-distance (duplicate) pairs skipped
    if not pos.any():
        return StretchReport(1.0, None, True)
    unreachable = pos & ~np.isfinite(dg)
    if unreachable.any():
        i, j = next(zip(*np.nonzero(unreachable)))
        return StretchReport(math.inf, (int(min(i, j)), int(max(i, j))), False)
    ratio = np.where(pos, dg / np.where(pos, d, 1.0), -math.inf)
    flat = int(np.argmax(ratio))
    i, j = divmod(flat, n)
    return StretchReport(float(ratio[i, j]), (int(min(i, j)), int(max(i, j))), True)


class StretchMonitor:
    """Per-prefix stretch verification in O(n^2) per step.

    Exploits that every online algorithm here only adds edges incident to the
    newest vertex: all-pairs spanner distances are maintained incrementally
    (new row by relaxation over the new edges, old pairs shortcut through the
    new vertex). Cross-checked against Dijkstra in the test suite.
    """

    def __init__(self, metric):
        self._dm = metric.matrix
        n = metric.n
        self._d = np.full((n, n), math.inf)
        np.fill_diagonal(self._d, 0.0)
        self._n = 0

    def add_vertex(self, edges):
        """Register the next vertex with its incident edges [(u, w), ...]."""
        i = self._n
        d = self._d
        if i > 0:
            row = np.full(i, math.inf)
            for u, w in edges:
                np.minimum(row, w + d[u, :i], out=row)
            d[i, :i] = row
            d[:i, i] = row
            np.minimum(d[:i, :i], row[:, None] + row[None, :], out=d[:i, :i])
        self._n += 1

    def stretch(self):
        """Max stretch over the current prefix (inf when disconnected)."""
        i = self._n
        if i <= 1:
            return 1.0
        d = self._d[:i, :i]
        dm = self._dm[:i, :i]
        pos = dm > 0.0
        if not pos.any():
            return 1.0
        return float(np.max(np.where(pos, d / np.where(pos, dm, 1.0), -math.inf)))

    def distances(self):
        return self._d[: self._n, : self._n]


def mst_weight(metric):
    """Exact MST of the complete graph on the metric via dense Prim."""
    n = metric.n
    if n < 1:
        raise SpannerError("mst_weight needs at least one point")
    if n == 1:
        return 0.0, []
    d = metric.matrix
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = d[0].copy()
    best_from = np.zeros(n, dtype=int)
    best[0] = math.inf
    edges = []
    total = 0.0
    for _ in range(n - 1):
        nxt = int(np.argmin(np.where(in_tree, math.inf, best)))
        w = float(best[nxt])
        edges.append((int(best_from[nxt]), nxt, w))
        total += w
        in_tree[nxt] = True
        closer = ~in_tree & (d[nxt] < best)
        best[closer] = d[nxt][closer]
        best_from[closer] = nxt
    return total, edges


@dataclass
class MetricsReport:
    total_weight: float
    mst_weight: float
    lightness: float
    edge_count: int
    sparsity: float
    baselines: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)


def metrics_report(graph, metric, baselines=None):
    """Weight/lightness/sparsity of a connected spanner, plus baseline ratios."""
    if not graph.is_connected():
        raise SpannerError("disconnected spanner: lightness undefined")
    n = metric.n
    weight = graph.total_weight()
    mst_w, _ = mst_weight(metric)
    if mst_w > 0.0:
        lightness = weight / mst_w
    else:
        lightness = 1.0 if weight == 0.0 else math.inf
    sparsity = graph.edge_count / (n - 1) if n > 1 else 1.0
    baselines = dict(baselines or {})
    ratios = {name: (weight / b if b > 0 else math.inf) for name, b in baselines.items()}
    return MetricsReport(weight, mst_w, lightness, graph.edge_count, sparsity, baselines, ratios)
