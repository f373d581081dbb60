"""Generators, invariants, and the text format."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabspan.graph import (GraphFormatError, KINDS, WEIGHT_DISTS, build_graph,
                            generate, is_connected, parse_graph, write_graph)


class TestGenerate:
    def test_path_shape(self):
        g = generate("path", 4, "all_equal", 0)
        assert g.m == 3
        assert all(w == 1 for _, _, w in g.edges)

    def test_star_shape(self):
        g = generate("star", 5, "all_equal", 0)
        assert g.m == 4
        assert g.degree(1) == 4
        assert all(g.degree(v) == 1 for v in (2, 3, 4, 5))

    def test_complete(self):
        g = generate("complete", 5, "uniform_1_to_n", 1)
        assert g.m == 10

    def test_grid_requires_square(self):
        g = generate("grid", 9, "all_equal", 0)
        assert g.n == 9 and g.m == 12
        with pytest.raises(ValueError):
            generate("grid", 8, "all_equal", 0)

    def test_random_connected(self):
        g = generate("random_connected", 16, "uniform_1_to_n", 7)
        assert g.n == 16
        assert is_connected(g)

    def test_deterministic(self):
        a = generate("random_connected", 12, "uniform_1_to_n", 3)
        b = generate("random_connected", 12, "uniform_1_to_n", 3)
        assert a.edges == b.edges
        c = generate("random_connected", 12, "uniform_1_to_n", 4)
        assert a.edges != c.edges

    def test_distinct_shuffled_weights(self):
        g = generate("path", 9, "distinct_shuffled", 5)
        ws = [w for _, _, w in g.edges]
        assert len(set(ws)) == len(ws)
        assert all(1 <= w <= 9 for w in ws)

    @given(st.sampled_from(KINDS), st.integers(min_value=1, max_value=30),
           st.sampled_from(WEIGHT_DISTS), st.integers(min_value=0, max_value=5))
    @settings(max_examples=60)
    def test_all_generated_graphs_valid(self, kind, n, dist, seed):
        if kind == "grid":
            n = max(1, int(n**0.5))**2
        g = generate(kind, n, dist, seed)
        assert g.n == n
        assert is_connected(g)
        assert all(1 <= w <= n for _, _, w in g.edges)
        assert all(u < v for u, v, _ in g.edges)
        for u, v, w in g.edges:
            assert g.weight(u, v) == w == g.weight(v, u)


class TestTextFormat:
    def test_triangle_parse(self):
        g = parse_graph("3 3\n1 2 1\n2 3 2\n1 3 3\n")
        assert g.n == 3 and g.m == 3
        assert g.weight(1, 3) == 3

    def test_comments_and_blank_lines(self):
        g = parse_graph("# triangle\n3 3\n\n1 2 1  # light\n2 3 2\n1 3 3\n")
        assert g.m == 3

    def test_disconnected_rejected(self):
        with pytest.raises(GraphFormatError):
            parse_graph("2 0\n")
        with pytest.raises(GraphFormatError):
            parse_graph("4 2\n1 2 1\n3 4 1\n")

    def test_error_carries_line_number(self):
        with pytest.raises(GraphFormatError) as e:
            parse_graph("3 3\n1 2 1\nbogus\n1 3 3\n")
        assert e.value.line == 3

    def test_duplicate_edge(self):
        with pytest.raises(GraphFormatError):
            parse_graph("3 3\n1 2 1\n1 2 2\n1 3 3\n")

    def test_weight_out_of_range(self):
        with pytest.raises(GraphFormatError):
            parse_graph("3 3\n1 2 1\n2 3 9\n1 3 3\n")

    def test_wide_weights_via_switch(self):
        g = parse_graph("3 3\n1 2 1\n2 3 9\n1 3 3\n", max_weight=27)
        assert g.weight(2, 3) == 9

    def test_u_ge_v_rejected(self):
        with pytest.raises(GraphFormatError):
            parse_graph("2 1\n2 1 1\n")

    def test_single_node(self):
        g = parse_graph("1 0\n")
        assert g.n == 1 and g.m == 0

    def test_sparse_ids_accepted(self):
        g = parse_graph("3 2\n1 5 1\n5 9 2\n")
        assert g.nodes == (1, 5, 9)

    @given(st.sampled_from(KINDS), st.integers(min_value=1, max_value=25),
           st.integers(min_value=0, max_value=4))
    @settings(max_examples=40)
    def test_round_trip(self, kind, n, seed):
        if kind == "grid":
            n = max(1, int(n**0.5))**2
        g = generate(kind, n, "uniform_1_to_n", seed)
        text = write_graph(g)
        h = parse_graph(text)
        assert h.edges == g.edges and h.nodes == g.nodes and h.n == g.n
        assert write_graph(h) == text  # canonical form is a fixpoint


class TestBuildGraph:
    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            build_graph(2, [(1, 1, 1), (1, 2, 1)])

    def test_unknown_node(self):
        with pytest.raises(ValueError):
            build_graph(2, [(1, 3, 1)])

    def test_id_cap(self):
        build_graph(2, [(1, 8, 1)], nodes=[1, 8])  # 8 == 2^3 allowed
        with pytest.raises(ValueError):
            build_graph(2, [(1, 9, 1)], nodes=[1, 9])
