"""Ordered greedy online spanner for arbitrary finite metrics revealed point by point."""

from __future__ import annotations

import math
from heapq import heappop, heappush

import numpy as np

from .graphs import SpannerGraph
from .metricspace import METRIC_RTOL, FiniteMetric


class MetricViolation(ValueError):
    """The revealed row breaks the triangle inequality against earlier points."""


class OrderedGreedy:
    """Maintains a t-spanner under the rule: examine candidate edges to all
    earlier points in ascending weight order and add one iff the current
    spanner distance exceeds t times the metric distance."""

    def __init__(self, t):
        if not t > 1.0:
            raise ValueError(f"stretch target must exceed 1, got {t}")
        self.t = float(t)
        self.graph = SpannerGraph()
        self.audit = []  # (u, v, w, spanner_distance_at_examination)
        self._adj = []
        self._dist = np.zeros((16, 16))
        self._n = 0

    @property
    def n(self):
        return self._n

    def revealed_metric(self):
        return FiniteMetric(self._dist[: self._n, : self._n], copy=False)

    def _check_row(self, row):
        n = self._n
        row = np.asarray(row, dtype=float)
        if row.shape != (n,):
            raise ValueError(f"expected {n} distances, got {row.shape}")
        if not np.isfinite(row).all() or (row < 0.0).any():
            raise MetricViolation("distances must be finite and nonnegative")
        if n == 0:
            return row
        d = self._dist[:n, :n]
        tol = METRIC_RTOL * max(float(row.max()), float(d.max()) if n > 1 else 0.0, 1e-300)
        spread = np.abs(row[:, None] - row[None, :])
        tight = np.maximum(spread - d, d - (row[:, None] + row[None, :]))
        np.fill_diagonal(tight, -math.inf)
        worst = float(tight.max())
        if worst > tol:
            a, b = np.unravel_index(int(np.argmax(tight)), tight.shape)
            raise MetricViolation(
                f"new point breaks the triangle inequality with ({a}, {b}) "
                f"by {worst:.3g} (d_ab={d[a, b]:.6g}, d_a·={row[a]:.6g}, d_b·={row[b]:.6g})"
            )
        return row

    def _grow(self, n):
        if n > len(self._dist):
            size = max(2 * len(self._dist), n)
            grid = np.zeros((size, size))
            grid[: self._n, : self._n] = self._dist[: self._n, : self._n]
            self._dist = grid

    def insert(self, distances_to_previous):
        """Reveal the next point; returns the edges added, in examination order."""
        row = self._check_row(distances_to_previous)
        i = self._n
        self._grow(i + 1)
        self._dist[i, :i] = row
        self._dist[:i, i] = row
        self._n += 1
        self.graph.add_vertices(1)
        self._adj.append([])
        if i == 0:
            return []
        candidates = sorted(range(i), key=lambda u: (row[u], u))
        added = []
        cur = self._sssp(i)
        for u in candidates:
            d = float(row[u])
            d_h = cur[u]
            if d_h > self.t * d:
                self.graph.add_edge(u, i, d)
                self._adj[u].append((i, d))
                self._adj[i].append((u, d))
                added.append((u, i, d))
                cur = self._sssp(i)  # edges added mid-insertion count as "currently"
            self.audit.append((u, i, d, d_h))
        return added

    def _sssp(self, source):
        dist = [math.inf] * self._n
        dist[source] = 0.0
        heap = [(0.0, source)]
        adj = self._adj
        while heap:
            dx, x = heappop(heap)
            if dx > dist[x]:
                continue
            for y, w in adj[x]:
                alt = dx + w
                if alt < dist[y]:
                    dist[y] = alt
                    heappush(heap, (alt, y))
        return dist


def spanner_distance_query(state, u, v, cutoff):
    """Exact spanner distance between u and v if it is at most cutoff, else None.

    Cutoff-bounded Dijkstra; with cutoff = t * d the greedy test is exact.
    """
    if not (0 <= u < state.n and 0 <= v < state.n):
        raise ValueError("endpoints must have arrived")
    if u == v:
        return 0.0
    dist = {u: 0.0}
    heap = [(0.0, u)]
    adj = state._adj
    while heap:
        dx, x = heappop(heap)
        if dx > cutoff:
            return None
        if x == v:
            return dx
        if dx > dist.get(x, math.inf):
            continue
        for y, w in adj[x]:
            alt = dx + w
            if alt <= cutoff and alt < dist.get(y, math.inf):
                dist[y] = alt
                heappush(heap, (alt, y))
    return None


def run_ordered_greedy(metric, t, order=None):
    """Reveal a finite metric row by row (optionally permuted) through the greedy."""
    m = metric.permute(order) if order is not None else metric
    state = OrderedGreedy(t)
    for i in range(m.n):
        state.insert(m.matrix[i, :i])
    return state
