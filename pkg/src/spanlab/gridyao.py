"""Online Euclidean (1+eps)-spanner: hierarchical grid + weight-capped ordered Yao graphs.

Levels are cells of an absolute grid anchored at the origin: level l has cell
side 2**-l (negative l = coarser). Every nonempty cell has a fixed
representative, the first point that landed in it; per level, each new
representative links to the closest earlier representative in every cone,
subject to the per-level length cap CAP * 2**-l * sqrt(d) / eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cones import aperture_for_epsilon, build_cone_cover
from .graphs import SpannerGraph

CAP_CONSTANT = 24.0  # per-level length cap multiplier; experimental knob


def cell_key(point, level):
    """Grid cell containing the point at this level (floor of point * 2**level)."""
    s = 2.0 ** level
    return tuple(math.floor(x * s) for x in point)


class _LevelState:
    """Representatives of one grid level, in assignment (arrival) order."""

    __slots__ = ("level", "reps", "order", "coords", "count")

    def __init__(self, level, dim):
        self.level = level
        self.reps = {}    # cell key -> point index
        self.order = []   # point indices, assignment order
        self.coords = np.empty((16, dim))
        self.count = 0

    def add(self, key, idx, point):
        if self.count == len(self.coords):
            grown = np.empty((2 * self.count, self.coords.shape[1]))
            grown[: self.count] = self.coords
            self.coords = grown
        self.coords[self.count] = point
        self.count += 1
        self.reps[key] = idx
        self.order.append(idx)

    def view(self):
        return self.coords[: self.count]


@dataclass(frozen=True)
class LevelEdge:
    step: int
    level: int
    u: int
    v: int
    w: float


class GridYaoSpanner:
    """State of the online algorithm; insertions are strictly sequential."""

    def __init__(self, dim, eps, cap_constant=CAP_CONSTANT, aperture=None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if not 0.0 < eps < 1.0:
            raise ValueError(f"eps must be in (0, 1), got {eps}")
        self.dim = dim
        self.eps = eps
        self.cap_constant = cap_constant
        self.theta = aperture if aperture is not None else aperture_for_epsilon(dim, eps)
        self.cones = build_cone_cover(dim, self.theta)
        self.graph = SpannerGraph()
        self.level_log = []  # every E_l addition, in order, as LevelEdge
        self._levels = {}
        self._pts = np.empty((16, dim))
        self._n = 0
        self._lo = np.full(dim, math.inf)
        self._hi = np.full(dim, -math.inf)
        self._max_abs = 0.0
        self._cap_unit = cap_constant * math.sqrt(dim) / eps  # cap(l) = _cap_unit * 2**-l

    # -- bookkeeping -------------------------------------------------------

    def _append_point(self, p):
        if self._n == len(self._pts):
            grown = np.empty((2 * self._n, self.dim))
            grown[: self._n] = self._pts
            self._pts = grown
        self._pts[self._n] = p
        self._n += 1
        self._lo = np.minimum(self._lo, p)
        self._hi = np.maximum(self._hi, p)
        self._max_abs = max(self._max_abs, float(np.abs(p).max()))

    def points(self):
        return self._pts[: self._n]

    def _cap(self, level):
        return self._cap_unit * 2.0 ** (-level)

    def _stable(self, level):
        # Levels at or coarser than a stable one contribute nothing new:
        # either a single cell holds every point (no second representative,
        # hence no edges), or the cell partition has frozen to the orthant
        # partition with caps beyond the diameter (identical edge sets).
        s = 2.0 ** level
        single = all(
            math.floor(self._lo[k] * s) == math.floor(self._hi[k] * s) for k in range(self.dim)
        )
        return single or 2.0 ** (-level) > self._max_abs

    def _coarsest_level(self):
        level = 0
        while not self._stable(level):
            level -= 1
        while self._stable(level + 1):
            level += 1
        return level

    def _finest_level(self, d_min):
        level = 0
        while self._cap(level) < d_min:
            level -= 1
        while self._cap(level + 1) >= d_min:
            level += 1
        return level

    def _level_state(self, level, upto):
        state = self._levels.get(level)
        if state is None:
            # Activating a level late is safe: no earlier point could have
            # added an edge here (its cap was below that point's nearest
            # distance at arrival), so only representatives are replayed.
            state = _LevelState(level, self.dim)
            for idx in range(upto):
                key = cell_key(self._pts[idx], level)
                if key not in state.reps:
                    state.add(key, idx, self._pts[idx])
            self._levels[level] = state
        return state

    # -- the algorithm -----------------------------------------------------

    def insert(self, p):
        """Insert the next point; returns the level-tagged edges it added."""
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise ValueError(f"expected a point of dimension {self.dim}")
        if not np.isfinite(p).all():
            raise ValueError("non-finite coordinate")
        idx = self._n
        self.graph.add_vertices(1)
        if idx == 0:
            self._append_point(p)
            return []
        diffs = self.points() - p
        dists = np.sqrt((diffs * diffs).sum(axis=1))
        d_min = float(dists.min())
        self._append_point(p)
        if d_min == 0.0:
            # duplicate of an existing point: it shares every cell with the
            # original, so it never becomes a representative
            return []
        added = []
        coarsest = self._coarsest_level()
        finest = self._finest_level(d_min)
        for level in range(coarsest, finest + 1):
            state = self._level_state(level, idx)
            key = cell_key(p, level)
            if key in state.reps:
                continue
            if state.count:
                added.extend(self._yao_edges(idx, p, state))
            state.add(key, idx, p)
        return added

    def _yao_edges(self, idx, p, state):
        cand = state.view()
        diffs = cand - p
        dists = np.sqrt((diffs * diffs).sum(axis=1))
        units = diffs / dists[:, None]
        member = self.cones.membership(units)
        cap = self._cap(state.level)
        out = []
        chosen = set()
        masked = np.where(member, dists[:, None], math.inf)
        best = np.argmin(masked, axis=0)  # first index wins ties: earliest rep
        for cone_i in range(self.cones.count):
            j = int(best[cone_i])
            w = float(masked[j, cone_i])
            if not math.isfinite(w) or not w < cap:
                continue
            q = state.order[j]
            if q in chosen:
                continue
            chosen.add(q)
            self.graph.add_edge_if_new(q, idx, w)
            edge = LevelEdge(idx, state.level, q, idx, w)
            self.level_log.append(edge)
            out.append(edge)
        return out

    def spanner(self):
        """The maintained spanner: deduplicated union over all levels."""
        return self.graph


def run_grid_yao(points, eps, dim=None, cap_constant=CAP_CONSTANT):
    """Insert a whole sequence; returns the final state."""
    pts = list(points)
    if dim is None:
        if not pts:
            raise ValueError("cannot infer dimension from an empty sequence")
        dim = len(pts[0])
    state = GridYaoSpanner(dim, eps, cap_constant=cap_constant)
    for p in pts:
        state.insert(p)
    return state
