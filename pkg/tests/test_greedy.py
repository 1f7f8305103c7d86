import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import spanlab as sl
from spanlab.greedy import MetricViolation

from oracles import dijkstra_ref, random_metric


def uniform_metric(n):
    return sl.FiniteMetric(np.ones((n, n)) - np.eye(n))


class TestGreedyInsert:
    def test_uniform_small_t_forces_complete(self):
        state = sl.run_ordered_greedy(uniform_metric(5), 1.5)
        assert state.graph.edge_count == 10

    def test_uniform_large_t_forces_star(self):
        state = sl.run_ordered_greedy(uniform_metric(5), 3.0)
        pairs = sorted((min(u, v), max(u, v)) for u, v, _ in state.graph.edges)
        assert pairs == [(0, 1), (0, 2), (0, 3), (0, 4)]

    def test_line_021_hand_trace(self):
        m = sl.FiniteMetric.from_points([(0.0,), (2.0,), (1.0,)], "l2")
        state = sl.run_ordered_greedy(m, 1.1)
        assert state.graph.edge_count == 3
        assert state.graph.total_weight() == 4.0

    def test_rejects_metric_violation_with_diagnostic(self):
        state = sl.OrderedGreedy(2.0)
        state.insert([])
        state.insert([1.0])
        with pytest.raises(MetricViolation):
            state.insert([1.0, 5.0])  # 5 > 1 + 1
        assert state.n == 2  # state unchanged by the rejected insert

    def test_t_must_exceed_one(self):
        with pytest.raises(ValueError):
            sl.OrderedGreedy(1.0)

    def test_equality_means_skip(self):
        # d_H == t*d exactly: the strict test must skip
        m = sl.FiniteMetric.from_points([(0.0,), (1.0,), (2.0,)], "l2")
        state = sl.run_ordered_greedy(m, 2.0)
        # candidate (0,2): d_H = 2 via two unit edges, t*d = 4 -> skip;
        # but check a crafted exact-equality case too
        m2 = sl.FiniteMetric(np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], float))
        state2 = sl.run_ordered_greedy(m2, 1.0 + 1e-12)
        assert not state2.graph.has_edge(0, 2)
        assert state.graph.edge_count == 2

    @given(st.integers(2, 32), st.integers(0, 10**6), st.sampled_from([1.5, 2.0, 3.0, 4.5]))
    @settings(max_examples=25, deadline=None)
    def test_prefix_stretch_bounded_by_t(self, n, seed, t):
        rng = np.random.default_rng(seed)
        metric = sl.FiniteMetric(random_metric(n, rng))
        state = sl.OrderedGreedy(t)
        for i in range(n):
            state.insert(metric.matrix[i, :i])
            rep = sl.max_stretch(state.graph, metric.prefix(i + 1))
            assert rep.max_stretch <= t * (1 + 1e-9)

    @given(st.integers(2, 24), st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_contains_online_spanning_tree(self, n, seed):
        rng = np.random.default_rng(seed)
        metric = sl.FiniteMetric(random_metric(n, rng))
        state = sl.run_ordered_greedy(metric, 3.0)
        for i in range(1, n):
            row = metric.matrix[i, :i]
            nearest = np.nonzero(row == row.min())[0]
            assert any(state.graph.has_edge(int(u), i) for u in nearest)

    def test_determinism(self):
        rng = np.random.default_rng(17)
        metric = sl.FiniteMetric(random_metric(20, rng))
        a = sl.run_ordered_greedy(metric, 2.0)
        b = sl.run_ordered_greedy(metric, 2.0)
        assert a.graph.edges == b.graph.edges
        assert a.audit == b.audit

    def test_audit_log_records_examinations(self):
        state = sl.run_ordered_greedy(uniform_metric(4), 3.0)
        examined = [(u, v) for u, v, _, _ in state.audit]
        assert len(examined) == len(set(examined)) == 3 + 2 + 1
        added = {(u, v) for u, v, _ in state.graph.edges}
        for u, v, w, d_h in state.audit:
            if (u, v) in added:
                assert d_h > state.t * w  # the rule held at the moment of examination
            else:
                assert d_h <= state.t * w


class TestSpannerDistanceQuery:
    def test_adjacent(self):
        state = sl.run_ordered_greedy(uniform_metric(3), 1.5)
        assert sl.spanner_distance_query(state, 0, 1, 10.0) == 1.0

    def test_disconnected_exceeds(self):
        state = sl.OrderedGreedy(2.0)
        state.insert([])
        state.insert([1.0])
        state.insert([1.0, 1.0])
        # remove nothing; query an absurdly small cutoff instead
        assert sl.spanner_distance_query(state, 0, 2, 0.5) is None

    def test_unarrived_endpoint(self):
        state = sl.OrderedGreedy(2.0)
        state.insert([])
        with pytest.raises(ValueError):
            sl.spanner_distance_query(state, 0, 3, 1.0)

    def test_cross_check_against_full_search(self):
        rng = np.random.default_rng(23)
        metric = sl.FiniteMetric(random_metric(40, rng))
        state = sl.run_ordered_greedy(metric, 2.5)
        for _ in range(50):
            u, v = rng.integers(0, 40, 2)
            if u == v:
                continue
            ref = dijkstra_ref(40, state.graph.edges, int(u))[int(v)]
            cutoff = float(rng.uniform(0.0, 2.0) * ref)
            got = sl.spanner_distance_query(state, int(u), int(v), cutoff)
            if ref <= cutoff:
                assert got == pytest.approx(ref, rel=1e-12)
            else:
                assert got is None
