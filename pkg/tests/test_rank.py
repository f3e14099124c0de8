"""Network ratings: power iteration, reversal, blended score."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etymo.errors import EmptyGraph, IdMismatch
from etymo.rank import (
    RankConfig,
    RankScores,
    combined_rating,
    compute_ranks,
    load_ranks,
    pagerank,
    reverse_pagerank,
    save_ranks,
)
from etymo.simnet import SimilarityGraph

import oracles


def _digraph(arcs, extra_nodes=()):
    g = SimilarityGraph(directed=True)
    for (s, t), w in arcs.items():
        g.set_edge(s, t, w)
    for n in extra_nodes:
        g.add_node(n)
    return g


def _random_digraph(rng, n, p=0.35):
    nodes = [f"n{i}" for i in range(n)]
    arcs = {}
    for s in nodes:
        for t in nodes:
            if s != t and rng.random() < p:
                arcs[(s, t)] = round(rng.uniform(0.05, 1.0), 4)
    return nodes, arcs


class TestPagerank:
    def test_two_node_cycle_splits_evenly(self):
        g = _digraph({("a", "b"): 1.0, ("b", "a"): 1.0})
        scores = pagerank(g)
        assert scores["a"] == pytest.approx(0.5, abs=1e-12)
        assert scores["b"] == pytest.approx(0.5, abs=1e-12)

    def test_single_node_gets_everything(self):
        g = SimilarityGraph(directed=True)
        g.add_node("only")
        assert pagerank(g) == {"only": pytest.approx(1.0, abs=1e-12)}

    def test_matches_dense_oracle(self):
        rng = random.Random(23)
        nodes, arcs = _random_digraph(rng, 8)
        g = _digraph(arcs, extra_nodes=nodes)
        got = pagerank(g, damping=0.85, iterations=10)
        want = oracles.pagerank_dense(nodes, arcs, damping=0.85, iterations=10)
        for n in nodes:
            assert got[n] == pytest.approx(want[n], abs=1e-12)

    def test_dangling_mass_redistributed(self):
        # b has no out-arcs; its mass must come back uniformly
        g = _digraph({("a", "b"): 1.0})
        got = pagerank(g, iterations=10)
        want = oracles.pagerank_dense(["a", "b"], {("a", "b"): 1.0}, 0.85, 10)
        assert got["a"] == pytest.approx(want["a"], abs=1e-12)
        assert got["b"] == pytest.approx(want["b"], abs=1e-12)
        assert got["b"] > got["a"]

    def test_sums_to_one_every_iteration_count(self):
        rng = random.Random(29)
        nodes, arcs = _random_digraph(rng, 7)
        g = _digraph(arcs, extra_nodes=nodes)
        for iterations in range(1, 6):
            scores = pagerank(g, iterations=iterations)
            assert sum(scores.values()) == pytest.approx(1.0, abs=1e-9)

    def test_weight_scaling_invariance(self):
        rng = random.Random(31)
        nodes, arcs = _random_digraph(rng, 6)
        g1 = _digraph(arcs, extra_nodes=nodes)
        g2 = _digraph({k: 7.5 * w for k, w in arcs.items()}, extra_nodes=nodes)
        a, b = pagerank(g1), pagerank(g2)
        for n in nodes:
            assert a[n] == pytest.approx(b[n], abs=1e-12)

    def test_ten_iterations_close_to_converged(self):
        rng = random.Random(37)
        nodes, arcs = _random_digraph(rng, 9)
        g = _digraph(arcs, extra_nodes=nodes)
        short = pagerank(g, iterations=10)
        long = pagerank(g, iterations=200)
        l1 = sum(abs(short[n] - long[n]) for n in nodes)
        assert l1 < 1e-2

    def test_tolerance_early_stop_matches_converged(self):
        rng = random.Random(41)
        nodes, arcs = _random_digraph(rng, 6)
        g = _digraph(arcs, extra_nodes=nodes)
        stopped = pagerank(g, iterations=500, tol=1e-12)
        long = pagerank(g, iterations=500)
        for n in nodes:
            assert stopped[n] == pytest.approx(long[n], abs=1e-9)

    def test_empty_graph_rejected(self):
        with pytest.raises(EmptyGraph):
            pagerank(SimilarityGraph(directed=True))

    def test_undirected_graph_rejected(self):
        g = SimilarityGraph()
        g.set_edge("a", "b", 1.0)
        with pytest.raises(ValueError):
            pagerank(g)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=30, deadline=None)
    def test_distribution_property_on_random_graphs(self, seed):
        rng = random.Random(seed)
        n = rng.randrange(2, 7)
        nodes, arcs = _random_digraph(rng, n, p=0.4)
        g = _digraph(arcs, extra_nodes=nodes)
        scores = pagerank(g)
        assert sum(scores.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(v > 0.0 for v in scores.values())


class TestReversePagerank:
    def test_identity_with_reversed_graph(self):
        rng = random.Random(43)
        nodes, arcs = _random_digraph(rng, 8)
        g = _digraph(arcs, extra_nodes=nodes)
        direct = reverse_pagerank(g)
        explicit = pagerank(g.reverse())
        assert direct == explicit  # bitwise identical, same code path

    def test_hub_of_in_star_scores_low_in_reverse(self):
        # leaves cite the hub: forward rank favors the hub, reverse
        # rank favors the leaves
        arcs = {(f"leaf{i}", "hub"): 1.0 for i in range(4)}
        g = _digraph(arcs)
        fwd = pagerank(g)
        rev = reverse_pagerank(g)
        assert fwd["hub"] > fwd["leaf0"]
        assert rev["hub"] < rev["leaf0"]


class TestCombinedRating:
    def test_beta_one_is_normalized_pagerank(self):
        pr = {"a": 0.5, "b": 0.3, "c": 0.2}
        rpr = {"a": 0.1, "b": 0.8, "c": 0.1}
        combined = combined_rating(pr, rpr, beta=1.0)
        assert combined == {
            "a": pytest.approx(1.0),
            "b": pytest.approx(0.6),
            "c": pytest.approx(0.4),
        }

    def test_beta_zero_is_normalized_reverse(self):
        pr = {"a": 0.5, "b": 0.5}
        rpr = {"a": 0.2, "b": 0.8}
        combined = combined_rating(pr, rpr, beta=0.0)
        assert combined == {"a": pytest.approx(0.25), "b": pytest.approx(1.0)}

    def test_blend_matches_hand_computation(self):
        rng = random.Random(47)
        nodes, arcs = _random_digraph(rng, 6)
        g = _digraph(arcs, extra_nodes=nodes)
        pr_o = oracles.pagerank_dense(nodes, arcs, 0.85, 10)
        rev_arcs = {(t, s): w for (s, t), w in arcs.items()}
        rpr_o = oracles.pagerank_dense(nodes, rev_arcs, 0.85, 10)
        max_pr, max_rpr = max(pr_o.values()), max(rpr_o.values())
        beta = 0.5
        want = {
            n: beta * pr_o[n] / max_pr + (1 - beta) * rpr_o[n] / max_rpr
            for n in nodes
        }
        scores = compute_ranks(g, RankConfig(beta=beta))
        for n in nodes:
            assert scores.combined[n] == pytest.approx(want[n], abs=1e-12)

    def test_bounded_by_one(self):
        rng = random.Random(53)
        nodes, arcs = _random_digraph(rng, 8)
        scores = compute_ranks(_digraph(arcs, extra_nodes=nodes))
        assert all(0.0 < v <= 1.0 + 1e-12 for v in scores.combined.values())

    def test_key_mismatch_rejected(self):
        with pytest.raises(IdMismatch):
            combined_rating({"a": 1.0}, {"b": 1.0}, beta=0.5)

    def test_ordered_breaks_ties_by_id(self):
        scores = RankScores(
            pagerank={"b": 0.5, "a": 0.5},
            reverse_pagerank={"b": 0.5, "a": 0.5},
            combined={"b": 1.0, "a": 1.0},
        )
        assert scores.ordered() == ["a", "b"]


class TestPersistence:
    def test_round_trip(self, tmp_path):
        g = _digraph({("a", "b"): 1.0, ("b", "c"): 0.5, ("c", "a"): 0.25})
        scores = compute_ranks(g)
        path = tmp_path / "ranks.json"
        save_ranks(scores, path)
        back = load_ranks(path)
        assert back.pagerank == scores.pagerank
        assert back.reverse_pagerank == scores.reverse_pagerank
        assert back.combined == scores.combined


class TestConfigValidation:
    def test_damping_range(self):
        with pytest.raises(ValueError):
            RankConfig(damping=1.0)

    def test_iterations_positive(self):
        with pytest.raises(ValueError):
            RankConfig(iterations=0)

    def test_beta_range(self):
        with pytest.raises(ValueError):
            RankConfig(beta=1.5)
