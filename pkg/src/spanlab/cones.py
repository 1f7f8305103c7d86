"""Cone covers of R^d and the aperture choice for a target stretch."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Membership slack on cosines so directions exactly on a cone boundary
# (e.g. lattice diagonals under a quadrant cover) are never dropped.
MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class ConeCover:
    """Axes of a cover of R^d by cones of the given aperture.

    Every unit vector lies within aperture/2 of some axis; axes are pairwise
    more than aperture/4 apart.
    """

    dim: int
    aperture: float
    axes: np.ndarray  # (k, dim), unit rows

    @property
    def count(self):
        return len(self.axes)

    @property
    def cos_half(self):
        return math.cos(self.aperture / 2.0)

    def membership(self, units):
        """Boolean (m, k) matrix: unit row i lies in cone j."""
        dots = np.atleast_2d(units) @ self.axes.T
        return dots >= self.cos_half - MEMBERSHIP_TOL

    def max_gap(self, units):
        """Largest angle from the sample directions to their nearest axis."""
        dots = np.clip(np.atleast_2d(units) @ self.axes.T, -1.0, 1.0)
        return float(np.arccos(dots.max(axis=1)).max())

    def min_axis_angle(self):
        dots = np.clip(self.axes @ self.axes.T, -1.0, 1.0)
        np.fill_diagonal(dots, -1.0)
        return float(np.arccos(dots.max()))


def build_cone_cover(dim, theta):
    if not 0.0 < theta < math.pi:
        raise ValueError(f"aperture must be in (0, pi), got {theta}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return _build_cached(int(dim), float(theta))


@lru_cache(maxsize=64)
def _build_cached(dim, theta):
    if dim == 1:
        axes = np.array([[1.0], [-1.0]])
    elif dim == 2:
        k = math.ceil(2.0 * math.pi / theta)
        ang = 2.0 * math.pi * np.arange(k) / k
        axes = np.column_stack([np.cos(ang), np.sin(ang)])
    elif dim == 3:
        axes = _cube_face_grid(dim, theta)
    else:
        axes = _greedy_sphere_cover(dim, theta)
    cover = ConeCover(dim, theta, axes)
    if cover.min_axis_angle() <= theta / 4.0:
        raise AssertionError("cone cover packing property failed")
    return cover


def _cube_face_grid(dim, theta):
    # Directions through a grid on the faces of [-1,1]^d. A direction hitting
    # a face at P has a grid node N on that face with |PN| <= h*sqrt(d-1)/2 and
    # |ON| >= 1, so the angular gap is at most asin(h*sqrt(d-1)/2). The grid
    # pitch keeps that below 0.95*theta/2 while adjacent nodes stay more than
    # theta/4 apart.
    h = min(0.63 * theta, 2.0 * math.sin(0.475 * theta) / math.sqrt(dim - 1))
    steps = max(1, math.ceil(2.0 / h))
    coords = np.linspace(-1.0, 1.0, steps + 1)
    seen = {}
    for axis in range(dim):
        for sign in (1.0, -1.0):
            for rest in np.stack(np.meshgrid(*([coords] * (dim - 1)), indexing="ij"), -1).reshape(-1, dim - 1):
                v = np.insert(rest, axis, sign)
                v = v / np.linalg.norm(v)
                key = tuple(np.round(v, 12))
                if key not in seen:
                    seen[key] = v
    return np.array([seen[k] for k in sorted(seen)])


def _greedy_sphere_cover(dim, theta):
    # Maximal 0.4*theta-separated subset of a dense seeded sample; coverage in
    # high dimensions is certified by sampling, not by construction.
    rng = np.random.default_rng(170)
    target = min(int(400 * (3.0 / theta) ** (dim - 1)), 300_000)
    sample = rng.normal(size=(max(target, 40_000), dim))
    sample /= np.linalg.norm(sample, axis=1, keepdims=True)
    cos_sep = math.cos(0.4 * theta)
    kept = [sample[0]]
    block = np.array(kept)
    for v in sample[1:]:
        if (block @ v).max() < cos_sep:
            kept.append(v)
            block = np.array(kept)
    return block


def aperture_for_epsilon(dim, eps):
    """Cone aperture making the ordered Yao graph a (1+eps)-spanner.

    In the plane this uses the ordered Yao spanning-ratio bound
    1/(1 - 2 sin(pi/k)) with the smallest k > 8 that reaches 1+eps; in
    higher dimensions a conservative eps/(2 sqrt(d)).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    if dim == 1:
        return math.pi / 2.0
    if dim == 2:
        k = 9
        while 1.0 / (1.0 - 2.0 * math.sin(math.pi / k)) > 1.0 + eps:
            k += 1
        return 2.0 * math.pi / k
    return eps / (2.0 * math.sqrt(dim))


def yao_cone_count(dim, eps):
    return build_cone_cover(dim, aperture_for_epsilon(dim, eps)).count
