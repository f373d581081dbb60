"""Sequential MST oracle: Kruskal vs brute-force enumeration."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabspan.graph import build_graph, generate
from stabspan.milestones import milestone_set, transform
from stabspan.oracle import (brute_force_mst_weight, is_spanning_tree, kruskal,
                             spanning_trees, tree_weight)

TRIANGLE = build_graph(3, [(1, 2, 1), (2, 3, 2), (1, 3, 3)])


class TestKruskal:
    def test_triangle_takes_two_lightest(self):
        # Brute force over the 3 spanning trees: weights 3, 4, 5.
        res = kruskal(TRIANGLE)
        assert res.edges == ((1, 2), (2, 3))
        assert res.weight == res.original_weight == 3

    def test_tree_input_returns_itself(self):
        g = generate("path", 6, "uniform_1_to_n", 2)
        res = kruskal(g)
        assert res.edges == tuple((u, v) for u, v, _ in g.edges)

    def test_transformed_triangle(self):
        # Under (16, -1) milestones {1, 4, 16}: weights {1,2,3} -> {1,4,4}.
        # All three trees enumerate to transformed weights 5, 5, 8.
        ms = milestone_set(16, -1)
        res = kruskal(TRIANGLE, lambda w: transform(w, ms))
        assert res.weight == 5

    def test_deterministic_tie_break(self):
        g = generate("complete", 5, "all_equal", 0)
        a = kruskal(g)
        b = kruskal(g)
        assert a.edges == b.edges
        # (weight, min endpoint, max endpoint) order picks the star at node 1.
        assert a.edges == ((1, 2), (1, 3), (1, 4), (1, 5))

    def test_reports_both_totals(self):
        ms = milestone_set(16, 0)
        res = kruskal(TRIANGLE, lambda w: transform(w, ms))
        assert res.original_weight == sum(TRIANGLE.weight(u, v) for u, v in res.edges)
        assert res.weight == sum(transform(TRIANGLE.weight(u, v), ms) for u, v in res.edges)


class TestBruteForce:
    def test_triangle(self):
        assert brute_force_mst_weight(TRIANGLE) == 3

    def test_path_is_sum_of_edges(self):
        g = generate("path", 7, "uniform_1_to_n", 4)
        assert brute_force_mst_weight(g) == sum(w for _, _, w in g.edges)

    def test_k4_distinct_matches_kruskal(self):
        g = build_graph(4, [(1, 2, 1), (1, 3, 4), (1, 4, 3), (2, 3, 2),
                            (2, 4, 4), (3, 4, 1)])
        assert brute_force_mst_weight(g) == kruskal(g).original_weight

    def test_size_guard(self):
        g = generate("path", 10, "all_equal", 0)
        with pytest.raises(ValueError):
            brute_force_mst_weight(g)

    @given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=20))
    @settings(max_examples=40, deadline=None)
    def test_cross_validation(self, n, seed):
        g = generate("random_connected", n, "uniform_1_to_n", seed)
        assert kruskal(g).original_weight == brute_force_mst_weight(g)


class TestSpanningTreePredicate:
    def test_two_triangle_edges(self):
        assert is_spanning_tree(TRIANGLE, [(1, 2), (2, 3)])

    def test_cycle_rejected(self):
        assert not is_spanning_tree(TRIANGLE, [(1, 2), (2, 3), (1, 3)])

    def test_wrong_count(self):
        assert not is_spanning_tree(TRIANGLE, [(1, 2)])

    def test_non_edge_rejected(self):
        g = generate("path", 4, "all_equal", 0)
        assert not is_spanning_tree(g, [(1, 2), (2, 3), (1, 4)])

    @given(st.integers(min_value=2, max_value=9), st.integers(min_value=0, max_value=20))
    @settings(max_examples=30, deadline=None)
    def test_kruskal_output_spans(self, n, seed):
        g = generate("random_connected", n, "uniform_1_to_n", seed)
        assert is_spanning_tree(g, kruskal(g).edges)

    def test_enumeration_counts_cayley(self):
        # K4 has 4^2 = 16 spanning trees.
        g = generate("complete", 4, "all_equal", 0)
        assert len(list(spanning_trees(g))) == 16


class TestTransferBound:
    @given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=15),
           st.data())
    @settings(max_examples=60, deadline=None)
    def test_transformed_mst_within_bound(self, n, seed, data):
        from stabspan.milestones import approximation_bound, valid_k_range
        g = generate("random_connected", n, "uniform_1_to_n", seed)
        lo, hi = valid_k_range(max(n, 2))
        k = data.draw(st.integers(min_value=lo, max_value=hi))
        ms = milestone_set(max(n, 2), k)
        tree = kruskal(g, lambda w: transform(w, ms)).edges
        original = tree_weight(g, tree)
        opt = brute_force_mst_weight(g)
        assert original <= approximation_bound(k, max(n, 2)) * opt
        if k == hi:
            assert original == opt
