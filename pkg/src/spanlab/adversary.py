"""Lower-bound instance generators and their verification oracles."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .graphs import SpannerGraph
from .metricspace import L1, L2, FiniteMetric, PointSequence


class GeneratorError(ValueError):
    pass


class SamplingBudgetExceeded(GeneratorError):
    pass


def _iceil(x):
    # ceil that forgives ~1e-9 of float noise on exact integers
    return math.ceil(x - 1e-9)


# -- L1 lattice adversary ------------------------------------------------------


@dataclass
class ScheduledSequence:
    """Lattice points with per-point presentation-step labels."""

    points: PointSequence
    steps: list
    core_steps: int  # steps < core_steps follow the two-phase norm schedule
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def batch(self, step):
        return [i for i, s in enumerate(self.steps) if s == step]


@dataclass(frozen=True)
class OrderedPair:
    x: int
    y: int
    batch: int  # x in X_{2*batch}, y in X_{2*batch+1}


def l1_lattice_sequence(d, eps):
    """All integer lattice points of [0, 1/(eps*d))^d, presented in batches:
    step 2i is L1 norm i, step 2i+1 is norm ceil(1/eps) - i, for 0 <= i < 1/(2*eps);
    norms the two phases miss are appended as trailing batches in ascending norm."""
    if d < 1:
        raise GeneratorError("d must be >= 1")
    if not 0.0 < eps < 1.0 / d:
        raise GeneratorError(f"need 0 < eps < 1/d, got eps={eps}, d={d}")
    if 1.0 / (eps * d) < 2.0 - 1e-9:
        raise GeneratorError(f"lattice side 1/(eps*d) must be >= 2, got {1.0 / (eps * d)}")
    m = _iceil(1.0 / (eps * d))
    big_k = _iceil(1.0 / eps)
    phases = _iceil(1.0 / (2.0 * eps))

    by_norm = {}
    for p in itertools.product(range(m), repeat=d):  # lexicographic within a batch
        by_norm.setdefault(sum(p), []).append(p)

    norm_of_step = {}
    for i in range(phases):
        for step, norm in ((2 * i, i), (2 * i + 1, big_k - i)):
            if norm in norm_of_step.values():
                raise GeneratorError(f"schedule would present norm {norm} twice")
            norm_of_step[step] = norm
    core_steps = 2 * phases
    presented = set(norm_of_step.values())
    trailing = sorted(n for n in by_norm if n not in presented)
    for offset, norm in enumerate(trailing):
        norm_of_step[core_steps + offset] = norm

    seq = PointSequence(dim=d, norm=L1)
    steps = []
    for step in sorted(norm_of_step):
        for p in by_norm.get(norm_of_step[step], []):
            seq.append(p)
            steps.append(step)
    if len(seq) != m**d:
        raise GeneratorError("schedule lost lattice points")
    meta = {"generator": "l1-lattice", "d": d, "eps": eps, "m": m, "ceil_inv_eps": big_k}
    return ScheduledSequence(seq, steps, core_steps, meta)


def ordered_pairs(sched):
    """Exhaustive ordered pairs: x in X_{2i}, y in X_{2i+1}, x <= y componentwise."""
    out = []
    for i in range(sched.core_steps // 2):
        for x in sched.batch(2 * i):
            px = sched.points[x]
            for y in sched.batch(2 * i + 1):
                py = sched.points[y]
                if all(a <= b for a, b in zip(px, py)):
                    out.append(OrderedPair(x, y, i))
    return out


@dataclass
class ViaPathReport:
    holds: bool
    direct: float          # ||x - y||_1
    threshold: float       # (1 + eps) * direct
    min_detour: float
    min_via: int | None
    violators: list = field(default_factory=list)


def verify_no_via_path(pair, sched, eps):
    """Brute-force check of the no-via-point property for one ordered pair:
    every point z presented at step <= 2i+1 detours strictly beyond (1+eps)."""
    px = sched.points[pair.x]
    py = sched.points[pair.y]
    direct = float(sum(abs(a - b) for a, b in zip(px, py)))
    threshold = (1.0 + eps) * direct
    min_detour, min_via = math.inf, None
    violators = []
    limit = 2 * pair.batch + 1
    for z, step in enumerate(sched.steps):
        if step > limit or z == pair.x or z == pair.y:
            continue
        pz = sched.points[z]
        detour = float(
            sum(abs(a - c) for a, c in zip(px, pz)) + sum(abs(c - b) for c, b in zip(pz, py))
        )
        if detour < min_detour:
            min_detour, min_via = detour, z
        if not detour > threshold:
            violators.append(z)
    return ViaPathReport(not violators, direct, threshold, min_detour, min_via, violators)


def manhattan_network(d, eps, sched=None):
    """Unit-distance grid graph on the lattice instance: the stretch-1 L1 baseline."""
    if sched is None:
        sched = l1_lattice_sequence(d, eps)
    index = {p: i for i, p in enumerate(sched.points)}
    g = SpannerGraph(len(sched))
    for p, i in index.items():
        for axis in range(d):
            q = p[:axis] + (p[axis] + 1,) + p[axis + 1 :]
            j = index.get(q)
            if j is not None:
                g.add_edge(i, j, 1.0)
    return g


# -- truncated girth metric adversary ------------------------------------------


def petersen_graph():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return _adjacency(10, edges)


def heawood_graph():
    # LCF [5, -5]^7 over a 14-cycle
    edges = [(i, (i + 1) % 14) for i in range(14)]
    edges += [(i, (i + 5) % 14) for i in range(0, 14, 2)]
    return _adjacency(14, edges)


def mcgee_graph():
    # LCF [12, 7, -7]^8 over a 24-cycle
    lcf = [12, 7, -7]
    edges = [(i, (i + 1) % 24) for i in range(24)]
    seen = set()
    for i in range(24):
        j = (i + lcf[i % 3]) % 24
        key = (min(i, j), max(i, j))
        if key not in seen:
            seen.add(key)
            edges.append(key)
    return _adjacency(24, edges)


NAMED_GRAPHS = {"petersen": petersen_graph, "heawood": heawood_graph, "mcgee": mcgee_graph}


def _adjacency(n, edges):
    adj = [[] for _ in range(n)]
    seen = set()
    for u, v in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        adj[u].append(v)
        adj[v].append(u)
    return adj


def bfs_distances(adj, source):
    n = len(adj)
    dist = [-1] * n
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist


def graph_girth(adj):
    """Exact girth of an unweighted graph (BFS from every vertex)."""
    n = len(adj)
    best = math.inf
    for root in range(n):
        dist = [-1] * n
        parent = [-1] * n
        dist[root] = 0
        frontier = [root]
        while frontier:
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if dist[y] < 0:
                        dist[y] = dist[x] + 1
                        parent[y] = x
                        nxt.append(y)
                    elif parent[x] != y and x < y:
                        best = min(best, dist[x] + dist[y] + 1)
            frontier = nxt
    return best


def truncated_girth_metric(adj, k):
    """BFS distances truncated at 2k-1: the high-girth lower-bound metric."""
    n = len(adj)
    cap = 2 * k - 1
    m = np.zeros((n, n))
    for s in range(n):
        dist = bfs_distances(adj, s)
        if min(dist) < 0:
            raise GeneratorError("graph must be connected")
        m[s] = np.minimum(dist, cap)
    girth = graph_girth(adj)
    if girth < 2 * k + 2:
        warnings.warn(
            f"girth {girth} below the recommended 2k+2 = {2 * k + 2}; "
            "the lower-bound argument may not bind",
            stacklevel=2,
        )
    return FiniteMetric(m, copy=False)


def star_append(metric, k):
    """Append a hub at distance (2k-1)/2 from every point; hub arrives last."""
    n = metric.n
    r = (2.0 * k - 1.0) / 2.0
    m = np.full((n + 1, n + 1), r)
    m[:n, :n] = metric.matrix
    m[n, n] = 0.0
    return FiniteMetric(m, copy=False), list(range(n + 1))


# -- high-dimensional hypercube adversary ---------------------------------------


def hypercube_pm1_sequence(d, eps, target_size, seed, budget=1_000_000):
    """Rejection-sample +-1 vectors whose pairwise Hamming distances all lie in
    [(1-eps)d/2, (1+eps)d/2]; the all-zeros point is appended last."""
    if d < 1 or target_size < 1:
        raise GeneratorError("d and target_size must be positive")
    rng = np.random.default_rng(seed)
    lo = (1.0 - eps) * d / 2.0
    hi = (1.0 + eps) * d / 2.0
    rows = np.empty((target_size, d))
    count = 0
    attempts = 0
    while count < target_size:
        attempts += 1
        if attempts > budget:
            need = 8.0 / (eps * eps)
            raise SamplingBudgetExceeded(
                f"gave up after {budget} attempts with {count}/{target_size} points; "
                f"Chernoff suggests d >= 8/eps^2 = {need:.0f} (got d={d}) or a smaller target"
            )
        cand = rng.integers(0, 2, size=d) * 2.0 - 1.0
        if count:
            ham = (d - rows[:count] @ cand) / 2.0
            if not ((ham >= lo) & (ham <= hi)).all():
                continue
        rows[count] = cand
        count += 1
    pts = [tuple(row) for row in rows] + [tuple(0.0 for _ in range(d))]
    return PointSequence(dim=d, norm=L2, points=pts)
