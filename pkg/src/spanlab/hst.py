"""Ultrametric / HST online spanners: nearest-first-arrival tree, power-of-alpha
rounding, and the multi-scale near-2-stretch construction."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .graphs import SpannerGraph
from .metricspace import FiniteMetric

ULTRAMETRIC_RTOL = 1e-12
TIE_RTOL = 1e-12  # nearest-neighbor distances within this relative gap are tied


class UltrametricViolation(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def ultrametric_violations(metric, rtol=ULTRAMETRIC_RTOL):
    """All (i, j, k) with dist(i,k) > max(dist(i,j), dist(j,k)) beyond tolerance."""
    m = metric.matrix if isinstance(metric, FiniteMetric) else np.asarray(metric, float)
    n = m.shape[0]
    tol = rtol * (m.max() if n else 0.0)
    out = []
    for j in range(n):
        cap = np.maximum(m[:, j][:, None], m[j, :][None, :])
        bad = m > cap + tol
        bad[j, :] = False
        bad[:, j] = False
        np.fill_diagonal(bad, False)
        for i, k in zip(*np.nonzero(bad)):
            out.append((int(i), int(j), int(k)))
    return out


# -- HST trees ---------------------------------------------------------------


@dataclass
class HstNode:
    label: float = 0.0
    children: list = field(default_factory=list)
    leaf: int | None = None

    @property
    def is_leaf(self):
        return self.leaf is not None


class HstTree:
    """Rooted tree with decreasing internal labels; leaves biject to point indices."""

    def __init__(self, root):
        self.root = root
        self.leaves = self._collect(root)
        idx = sorted(self.leaves)
        if idx != list(range(len(idx))):
            raise ValueError("leaf indices must biject to 0..n-1")

    def _collect(self, node):
        if node.is_leaf:
            return [node.leaf]
        out = []
        for c in node.children:
            out.extend(self._collect(c))
        return out

    @property
    def n(self):
        return len(self.leaves)

    def validate(self, alpha=None):
        """Label violations: children of internal nodes must carry strictly
        smaller labels (for an alpha-HST, at most label/alpha)."""
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                continue
            if node.label <= 0.0:
                out.append(("nonpositive-label", node.label))
            for c in node.children:
                child_label = 0.0 if c.is_leaf else c.label
                if child_label >= node.label:
                    out.append(("label-not-decreasing", node.label, child_label))
                if alpha is not None and not c.is_leaf and node.label < alpha * c.label:
                    out.append(("alpha-ratio", node.label, c.label))
                stack.append(c)
        return out

    def metric(self):
        """Induced ultrametric: distance is the label of the least common ancestor."""
        n = self.n
        m = np.zeros((n, n))

        def fill(node):
            if node.is_leaf:
                return [node.leaf]
            groups = [fill(c) for c in node.children]
            for a in range(len(groups)):
                for b in range(a + 1, len(groups)):
                    ia = np.array(groups[a])
                    ib = np.array(groups[b])
                    m[np.ix_(ia, ib)] = node.label
                    m[np.ix_(ib, ia)] = node.label
            return [x for g in groups for x in g]

        fill(self.root)
        return FiniteMetric(m, copy=False)

    def to_dict(self):
        def conv(node):
            if node.is_leaf:
                return {"leaf": node.leaf}
            return {"label": node.label, "children": [conv(c) for c in node.children]}

        return conv(self.root)

    @classmethod
    def from_dict(cls, d):
        def conv(obj):
            if "leaf" in obj:
                return HstNode(leaf=int(obj["leaf"]))
            return HstNode(
                label=float(obj["label"]),
                children=[conv(c) for c in obj["children"]],
            )

        return cls(conv(d))


def random_hst(n, depth=6, seed=0, alpha=None, root_label=1.0):
    """Deterministic-for-seed random HST with n leaves and strictly decreasing labels."""
    if n < 1:
        raise ValueError("need at least one leaf")
    rng = random.Random(seed)
    counter = [0]

    def leaf():
        node = HstNode(leaf=counter[0])
        counter[0] += 1
        return node

    def build(count, label, levels):
        if count == 1:
            return leaf()
        if levels <= 0:
            return HstNode(label=label, children=[leaf() for _ in range(count)])
        k = rng.randint(2, min(4, count))
        cuts = sorted(rng.sample(range(1, count), k - 1))
        sizes = [b - a for a, b in zip([0] + cuts, cuts + [count])]
        children = []
        for size in sizes:
            if size == 1:
                children.append(leaf())
            else:
                shrink = rng.uniform(0.25, 1.0) / alpha if alpha else rng.uniform(0.25, 0.85)
                children.append(build(size, label * shrink, levels - 1))
        return HstNode(label=label, children=children)

    if n == 1:
        return HstTree(leaf())
    return HstTree(build(n, root_label, depth))


# -- the online nearest-first-arrival tree ------------------------------------


class HstOnlineState:
    """Builds the online tree: each arrival links to the earliest-arrived point
    among its nearest neighbors under the revealed ultrametric."""

    def __init__(self):
        self.graph = SpannerGraph()
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
            raise UltrametricViolation("distances must be finite and nonnegative")
        if n < 1:
            return row
        d = self._dist[:n, :n]
        scale = max(float(row.max()), float(d.max()) if n > 1 else 0.0)
        tol = ULTRAMETRIC_RTOL * scale
        # d(a,b) <= max(d(a,new), d(b,new)) and d(a,new) <= max(d(a,b), d(b,new))
        cap = np.maximum(row[:, None], row[None, :])
        bad = d - cap
        np.fill_diagonal(bad, -math.inf)
        if float(bad.max()) > tol:
            a, b = np.unravel_index(int(np.argmax(bad)), bad.shape)
            raise UltrametricViolation(
                f"max-triangle violated on ({a}, {b}, new)", witness=(int(a), int(b), n)
            )
        cap2 = np.maximum(d, row[None, :])
        bad2 = row[:, None] - cap2
        np.fill_diagonal(bad2, -math.inf)
        if float(bad2.max()) > tol:
            a, b = np.unravel_index(int(np.argmax(bad2)), bad2.shape)
            raise UltrametricViolation(
                f"max-triangle violated on ({a}, new, {b})", witness=(int(a), int(b), n)
            )
        return row

    def _grow(self, n):
        if n > len(self._dist):
            size = max(2 * len(self._dist), n)
            grid = np.zeros((size, size))
            grid[: self._n, : self._n] = self._dist[: self._n, : self._n]
            self._dist = grid

    def insert(self, distances_to_previous):
        """Add the next leaf; returns the one new edge (None for the first point)."""
        row = self._check_row(distances_to_previous)
        i = self._n
        self._grow(i + 1)
        self._dist[i, :i] = row
        self._dist[:i, i] = row
        self._n += 1
        self.graph.add_vertices(1)
        if i == 0:
            return None
        nearest = float(row.min())
        tied = np.nonzero(row <= nearest * (1.0 + TIE_RTOL))[0]
        u = int(tied[0])  # indices are arrival order, so first tie = earliest
        w = float(row[u])
        self.graph.add_edge(u, i, w)
        return (u, i, w)


# -- rounding ------------------------------------------------------------------


def _round_to_powers(values, log_base, log_offset=0.0):
    """Round each positive value up to the smallest exp(log_offset + j*log_base),
    j integer. Index found in log space, then corrected by direct comparison."""
    v = np.asarray(values, dtype=float)
    out = v.astype(float).copy()
    pos = v > 0.0
    if not pos.any():
        return out
    x = v[pos]
    j = np.ceil((np.log(x) - log_offset) / log_base)
    val = np.exp(log_offset + j * log_base)
    down = np.exp(log_offset + (j - 1.0) * log_base) >= x
    j = np.where(down, j - 1.0, j)
    val = np.where(down, np.exp(log_offset + j * log_base), val)
    up = val < x
    j = np.where(up, j + 1.0, j)
    val = np.where(up, np.exp(log_offset + j * log_base), val)
    out[pos] = val
    return out


def alpha_round(metric, alpha):
    """Round every positive distance of an ultrametric up to the next integer
    power of alpha; the result is an alpha-HST ultrametric with d <= r < alpha*d."""
    if not alpha > 1.0:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    viol = ultrametric_violations(metric)
    if viol:
        raise UltrametricViolation(f"input is not an ultrametric: {viol[0]}", witness=viol[0])
    rounded = _round_to_powers(metric.matrix, math.log(alpha))
    return FiniteMetric(rounded, copy=False)


class AlphaRoundedOnline:
    """Online pipeline: decisions on the alpha-rounded metric, edges reported
    with their original weights."""

    def __init__(self, alpha):
        if not alpha > 1.0:
            raise ValueError(f"alpha must exceed 1, got {alpha}")
        self.alpha = float(alpha)
        self._log_alpha = math.log(alpha)
        self.inner = HstOnlineState()
        self.graph = SpannerGraph()
        self._orig = HstOnlineState()  # validates and stores the original reveal

    @property
    def n(self):
        return self.inner.n

    def insert(self, distances_to_previous):
        row = np.asarray(distances_to_previous, dtype=float)
        self._orig._check_row(row)
        rounded = _round_to_powers(row, self._log_alpha)
        edge = self.inner.insert(rounded)
        self._orig.insert(row)
        self.graph.add_vertices(1)
        if edge is None:
            return None
        u, i, _ = edge
        w = float(row[u])
        self.graph.add_edge(u, i, w)
        return (u, i, w)


def alpha_spanner_online(metric, alpha, order=None):
    """Run the rounded pipeline over a revealed ultrametric; returns the state."""
    m = metric.permute(order) if order is not None else metric
    state = AlphaRoundedOnline(alpha)
    for i in range(m.n):
        state.insert(m.matrix[i, :i])
    return state


# -- multi-scale (2+eps) construction -----------------------------------------


def multiscale_kappa(eps):
    """floor(log_{1+eps}(1/eps)), computed in log space with direct correction."""
    kappa = math.floor(math.log(1.0 / eps) / math.log1p(eps))
    while (1.0 + eps) ** (kappa + 1) <= 1.0 / eps:
        kappa += 1
    while kappa > 0 and (1.0 + eps) ** kappa > 1.0 / eps:
        kappa -= 1
    return kappa


class MultiScaleSpanner:
    """kappa+1 rounded copies, each an eps^-1-HST run, unioned with original weights."""

    def __init__(self, eps):
        if not 0.0 < eps < 0.5:
            raise ValueError(f"eps must be in (0, 1/2), got {eps}")
        self.eps = float(eps)
        self.kappa = multiscale_kappa(eps)
        self._log_base = math.log(1.0 / eps)
        self._log_offsets = [i * math.log1p(eps) for i in range(self.kappa + 1)]
        self.copies = [HstOnlineState() for _ in range(self.kappa + 1)]
        self.graph = SpannerGraph()
        self._orig = HstOnlineState()

    @property
    def n(self):
        return self._orig.n

    def rounded_row(self, copy_index, row):
        return _round_to_powers(row, self._log_base, self._log_offsets[copy_index])

    def insert(self, distances_to_previous):
        """Insert into every rounded copy; returns new union edges (original weights)."""
        row = np.asarray(distances_to_previous, dtype=float)
        self._orig._check_row(row)
        i = self._orig.n
        added = []
        self.graph.add_vertices(1)
        for idx, copy in enumerate(self.copies):
            edge = copy.insert(self.rounded_row(idx, row))
            if edge is None:
                continue
            u, _, _ = edge
            if self.graph.add_edge_if_new(u, i, float(row[u])):
                added.append((u, i, float(row[u])))
        self._orig.insert(row)
        return added


def run_multiscale(metric, eps, order=None):
    m = metric.permute(order) if order is not None else metric
    state = MultiScaleSpanner(eps)
    for i in range(m.n):
        state.insert(m.matrix[i, :i])
    return state


def run_hst_online(metric, order=None):
    """Run the plain nearest-first-arrival tree over a revealed ultrametric."""
    m = metric.permute(order) if order is not None else metric
    state = HstOnlineState()
    for i in range(m.n):
        state.insert(m.matrix[i, :i])
    return state
