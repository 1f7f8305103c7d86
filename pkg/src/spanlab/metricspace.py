"""Point sequences, finite metrics, and metric validity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

L1 = "l1"
L2 = "l2"
NORMS = (L1, L2)

# Triangle-inequality slack, relative to the largest distance in the matrix.
METRIC_RTOL = 1e-9

_CDIST_NAME = {L1: "cityblock", L2: "euclidean"}


def distance(p, q, norm=L2):
    """Distance between two coordinate tuples under the given norm."""
    if len(p) != len(q):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(q)}")
    if norm not in NORMS:
        raise ValueError(f"unknown norm {norm!r}")
    total = 0.0
    for a, b in zip(p, q):
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("non-finite coordinate")
        d = a - b
        total += abs(d) if norm == L1 else d * d
    return total if norm == L1 else math.sqrt(total)


@dataclass
class PointSequence:
    """Ordered points in arrival order; index order is the online order."""

    dim: int
    norm: str = L2
    points: list = field(default_factory=list)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.norm not in NORMS:
            raise ValueError(f"unknown norm {self.norm!r}")
        self.points = [self._check(p) for p in self.points]

    def _check(self, p):
        p = tuple(float(x) for x in p)
        if len(p) != self.dim:
            raise ValueError(f"point has {len(p)} coordinates, expected {self.dim}")
        if not all(math.isfinite(x) for x in p):
            raise ValueError("non-finite coordinate")
        return p

    def append(self, p):
        self.points.append(self._check(p))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def asarray(self):
        return np.asarray(self.points, dtype=float).reshape(len(self.points), self.dim)

    def to_metric(self):
        return FiniteMetric.from_points(self)


class FiniteMetric:
    """Symmetric distance oracle over n indexed points, matrix-backed."""

    def __init__(self, matrix, copy=True):
        m = np.array(matrix, dtype=float, copy=copy)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("distance matrix must be square")
        self._m = m

    @classmethod
    def from_points(cls, points, norm=None):
        if isinstance(points, PointSequence):
            arr, norm = points.asarray(), points.norm
        else:
            arr = np.asarray(points, dtype=float)
            norm = norm or L2
        if len(arr) == 0:
            return cls(np.zeros((0, 0)))
        return cls(cdist(arr, arr, _CDIST_NAME[norm]), copy=False)

    @property
    def n(self):
        return self._m.shape[0]

    @property
    def matrix(self):
        return self._m

    def dist(self, i, j):
        return float(self._m[i, j])

    def prefix(self, k):
        """Metric restricted to the first k points (shares storage)."""
        return FiniteMetric(self._m[:k, :k], copy=False)

    def permute(self, order):
        """Metric reindexed so that new index a maps to old index order[a]."""
        idx = np.asarray(order, dtype=int)
        return FiniteMetric(self._m[np.ix_(idx, idx)], copy=False)

    def scale(self):
        return float(self._m.max()) if self.n else 0.0


def validate_metric(metric, rtol=METRIC_RTOL):
    """Return every metric-axiom violation; an empty list means valid.

    Violations are tuples: ("diagonal", i, value), ("asymmetry", i, j, gap),
    ("negative", i, j, value), ("triangle", i, j, k, excess) where the triple
    means dist(i,k) > dist(i,j) + dist(j,k) beyond tolerance.
    """
    m = metric.matrix if isinstance(metric, FiniteMetric) else np.asarray(metric, float)
    n = m.shape[0]
    tol = rtol * (m.max() if n else 0.0)
    out = []
    diag = np.diagonal(m)
    for i in np.nonzero(diag != 0.0)[0]:
        out.append(("diagonal", int(i), float(m[i, i])))
    asym = np.abs(m - m.T)
    for i, j in zip(*np.nonzero(asym > tol)):
        if i < j:
            out.append(("asymmetry", int(i), int(j), float(asym[i, j])))
    for i, j in zip(*np.nonzero(m < 0.0)):
        if i <= j:
            out.append(("negative", int(i), int(j), float(m[i, j])))
    for j in range(n):
        # all (i, k) pairs routed through j at once
        excess = m - (m[:, j][:, None] + m[j, :][None, :])
        bad = excess > tol
        bad[j, :] = False
        bad[:, j] = False
        np.fill_diagonal(bad, False)
        for i, k in zip(*np.nonzero(bad)):
            out.append(("triangle", int(i), int(j), int(k), float(excess[i, k])))
    return out
