import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coattention.graph import (
    PageRankConvergenceError,
    WeightedGraph,
    pagerank,
    weighted_jaccard,
)

from oracles import pagerank_dense_solve, weighted_jaccard_direct


class TestWeightedGraph:
    def test_self_loops_dropped(self):
        g = WeightedGraph([("a", "a", 5.0), ("a", "b", 1.0)], directed=True)
        assert g.self_loops_dropped == 1
        assert g.n_edges == 1

    def test_duplicate_edges_sum(self):
        g = WeightedGraph([("a", "b", 1.0), ("a", "b", 2.0)], directed=True)
        assert g.weight("a", "b") == 3.0

    def test_undirected_symmetric(self):
        g = WeightedGraph([("a", "b", 2.0)], directed=False)
        assert g.weight("b", "a") == 2.0
        assert g.n_edges == 1

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            WeightedGraph([("a", "b", float("nan"))], directed=False)

    def test_subgraph_induced(self):
        g = WeightedGraph(
            [("a", "b", 1.0), ("b", "c", 2.0), ("a", "c", 3.0)], directed=True
        )
        sub = g.subgraph(["a", "b"])
        assert sub.nodes() == ["a", "b"]
        assert sub.weight("a", "b") == 1.0
        assert not sub.has_edge("b", "c")

    def test_projection_sum_and_unit(self):
        g = WeightedGraph([("a", "b", 2.0), ("b", "a", 3.0)], directed=True)
        assert g.undirected_projection("sum").weight("a", "b") == 5.0
        assert g.undirected_projection("unit").weight("a", "b") == 1.0

    def test_adjacent_pairs_direction_blind(self):
        g = WeightedGraph([("b", "a", 1.0), ("a", "c", 1.0)], directed=True)
        assert set(g.adjacent_pairs()) == {("b", "a"), ("a", "c")} or len(
            g.adjacent_pairs()
        ) == 2

    def test_tsv_round_trip(self, tmp_path):
        g = WeightedGraph([("a", "b", 1.5), ("b", "c", 101.25)], directed=True)
        path = tmp_path / "edges.tsv"
        g.to_tsv(path)
        back = WeightedGraph.from_tsv(path, directed=True)
        assert sorted(back.edges()) == sorted(g.edges())


class TestPagerank:
    def test_directed_three_cycle_uniform(self):
        g = WeightedGraph([("a", "b", 1), ("b", "c", 1), ("c", "a", 1)], directed=True)
        scores = pagerank(g)
        for value in scores.values():
            assert value == pytest.approx(1 / 3, abs=1e-9)

    def test_single_node_scores_one(self):
        g = WeightedGraph(nodes=["solo"], directed=True)
        assert pagerank(g) == {"solo": 1.0}

    def test_star_graph_matches_dense_solve(self):
        edges = [(f"leaf{i}", "hub", 1.0) for i in range(4)]
        g = WeightedGraph(edges, directed=True)
        scores = pagerank(g, damping=0.85, tolerance=1e-14)
        oracle = pagerank_dense_solve(g.nodes(), edges, 0.85)
        for node in g.nodes():
            assert scores[node] == pytest.approx(oracle[node], abs=1e-8)

    def test_weighted_directed_matches_dense_solve(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            edges = []
            for i in range(n):
                for j in range(n):
                    if i != j and rng.random() < 0.4:
                        edges.append((i, j, float(rng.uniform(0.1, 5.0))))
            g = WeightedGraph(edges, directed=True, nodes=range(n))
            scores = pagerank(g, tolerance=1e-13)
            oracle = pagerank_dense_solve(g.nodes(), edges, 0.85)
            for node in g.nodes():
                assert scores[node] == pytest.approx(oracle[node], abs=1e-8)

    def test_scores_sum_to_one(self):
        g = WeightedGraph([("a", "b", 3.0), ("c", "b", 1.0)], directed=True)
        scores = pagerank(g)
        assert sum(scores.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(v >= 0 for v in scores.values())

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            pagerank(WeightedGraph())

    def test_damping_bounds(self):
        g = WeightedGraph([("a", "b", 1)], directed=True)
        with pytest.raises(ValueError):
            pagerank(g, damping=1.0)

    def test_negative_weight_rejected(self):
        g = WeightedGraph([("a", "b", -1.0)], directed=True)
        with pytest.raises(ValueError):
            pagerank(g)

    def test_nonconvergence_carries_last_iterate(self):
        g = WeightedGraph([("a", "b", 1), ("b", "a", 1)], directed=True)
        with pytest.raises(PageRankConvergenceError) as excinfo:
            pagerank(g, tolerance=0.0, max_iterations=3)
        last = excinfo.value.last_iterate
        assert set(last) == {"a", "b"}
        assert sum(last.values()) == pytest.approx(1.0)


class TestWeightedJaccard:
    def test_identity(self):
        v = {"a": 0.25, "b": 0.75}
        assert weighted_jaccard(v, v) == 1.0

    def test_disjoint_supports(self):
        assert weighted_jaccard({"a": 1.0}, {"b": 1.0}) == 0.0

    def test_half_overlap_example(self):
        # min-sum 0.5 over max-sum 1.5
        assert weighted_jaccard({"a": 0.5, "b": 0.5}, {"a": 0.5, "c": 0.5}) == pytest.approx(
            1 / 3, abs=1e-15
        )

    def test_both_zero(self):
        assert weighted_jaccard({}, {}) == 0.0
        assert weighted_jaccard({"a": 0.0}, {"a": 0.0}) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            weighted_jaccard({"a": -0.1}, {"a": 1.0})

    @given(
        st.dictionaries(st.integers(0, 10), st.floats(0, 100), max_size=8),
        st.dictionaries(st.integers(0, 10), st.floats(0, 100), max_size=8),
    )
    @settings(max_examples=200, deadline=None)
    def test_symmetric_bounded_and_matches_oracle(self, a, b):
        s = weighted_jaccard(a, b)
        assert s == weighted_jaccard(b, a)
        assert 0.0 <= s <= 1.0
        assert s == pytest.approx(weighted_jaccard_direct(a, b), abs=1e-12)

    @given(st.sets(st.integers(0, 12), max_size=8), st.sets(st.integers(0, 12), max_size=8))
    @settings(max_examples=200, deadline=None)
    def test_unit_weights_equal_set_jaccard(self, xs, ys):
        a = {k: 1.0 for k in xs}
        b = {k: 1.0 for k in ys}
        expected = len(xs & ys) / len(xs | ys) if xs | ys else 0.0
        assert weighted_jaccard(a, b) == pytest.approx(expected, abs=1e-12)

    @given(
        st.dictionaries(st.integers(0, 6), st.floats(0.01, 10), min_size=1, max_size=6),
        st.dictionaries(st.integers(0, 6), st.floats(0.01, 10), min_size=1, max_size=6),
        st.floats(0.001, 1000),
    )
    @settings(max_examples=100, deadline=None)
    def test_scale_invariance(self, a, b, c):
        base = weighted_jaccard(a, b)
        scaled = weighted_jaccard({k: c * v for k, v in a.items()}, {k: c * v for k, v in b.items()})
        assert scaled == pytest.approx(base, rel=1e-9)
