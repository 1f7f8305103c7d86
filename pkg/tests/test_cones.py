import math

import numpy as np
import pytest

import spanlab as sl


def unit_sample(dim, count, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


class TestBuildConeCover:
    def test_dim1_two_rays(self):
        cover = sl.build_cone_cover(1, 1.0)
        assert sorted(cover.axes[:, 0]) == [-1.0, 1.0]

    def test_dim2_quadrants(self):
        cover = sl.build_cone_cover(2, math.pi / 2)
        assert cover.count == 4
        dots = np.abs(cover.axes @ cover.axes.T)
        assert np.allclose(np.sort(dots, axis=None)[-8:], 1.0)  # opposite/self pairs

    def test_dim2_boundary_membership(self):
        # lattice diagonal sits exactly between quadrant axes: must be covered
        cover = sl.build_cone_cover(2, math.pi / 2)
        diag = np.array([[1.0, 1.0]]) / math.sqrt(2)
        assert cover.membership(diag).any()

    def test_dim3_coverage_certified_by_sampling(self):
        cover = sl.build_cone_cover(3, math.pi / 6)
        gap = cover.max_gap(unit_sample(3, 100_000, seed=7))
        assert gap <= cover.aperture / 2

    def test_packing_bounds_count(self):
        for dim, theta in ((2, 0.3), (3, 0.25), (3, math.pi / 6)):
            cover = sl.build_cone_cover(dim, theta)
            assert cover.min_axis_angle() > theta / 4
            assert cover.count <= 200.0 * theta ** (1 - dim)

    def test_deterministic(self):
        a = sl.build_cone_cover(3, 0.21)
        b = sl.build_cone_cover(3, 0.21)
        assert np.array_equal(a.axes, b.axes)

    def test_aperture_range_errors(self):
        with pytest.raises(ValueError):
            sl.build_cone_cover(2, 0.0)
        with pytest.raises(ValueError):
            sl.build_cone_cover(2, math.pi)


class TestApertureForEpsilon:
    def test_dim2_eps1(self):
        # evaluate the spanning-ratio formula for increasing k: k=10 still gives
        # ~2.61 > 2, the first k > 8 at or under 1+eps is 13
        ratio = lambda k: 1.0 / (1.0 - 2.0 * math.sin(math.pi / k))
        assert ratio(10) > 2.0
        k = next(k for k in range(9, 100) if ratio(k) <= 2.0)
        assert k == 13
        assert sl.aperture_for_epsilon(2, 1.0 - 1e-12) == pytest.approx(2 * math.pi / 13)

    def test_dim2_growth_rate(self):
        # k grows as Theta(1/eps)
        k = lambda eps: round(2 * math.pi / sl.aperture_for_epsilon(2, eps))
        assert 1.7 <= k(0.01) / k(0.02) <= 2.3

    def test_dim3_formula(self):
        assert sl.aperture_for_epsilon(3, 0.5) == pytest.approx(0.5 / (2 * math.sqrt(3)))

    def test_yao_spanner_property(self):
        # the chosen aperture must make the full ordered Yao graph a (1+eps)-spanner
        rng = np.random.default_rng(3)
        for dim, eps in ((2, 0.5), (3, 0.5)):
            pts = rng.random((48, dim))
            state = sl.GridYaoSpanner(dim, eps)
            for p in pts:
                state.insert(p)
            m = sl.FiniteMetric.from_points(pts, "l2")
            assert sl.max_stretch(state.graph, m).max_stretch <= (1 + eps) ** 2 * (1 + 1e-9)

    def test_range_errors(self):
        with pytest.raises(ValueError):
            sl.aperture_for_epsilon(2, 0.0)
        with pytest.raises(ValueError):
            sl.aperture_for_epsilon(2, 1.5)
