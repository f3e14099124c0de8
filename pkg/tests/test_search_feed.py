"""Query ranking, related lists, and the per-user feed."""

from datetime import datetime, timezone

import pytest

from etymo.corpus import FeedbackEvent, FeedbackKind, ImpressionStore
from etymo.errors import NotFound
from etymo.search_feed import (
    FeedReason,
    build_inverted_index,
    feed,
    load_index,
    query_vector,
    record_impressions,
    related,
    save_index,
    search,
)
from etymo.simnet import SimilarityGraph
from etymo.vectorize import build_lexicon, tfidf_vector

import oracles
from conftest import make_doc


def _event(user, kind, doc_id):
    return FeedbackEvent(
        user=user, kind=kind, doc_id=doc_id, timestamp=datetime.now(timezone.utc)
    )


@pytest.fixture
def searchable():
    docs = [
        make_doc("alpha", "ranking networks with teleport jumps"),
        make_doc("bravo", "ranking citation networks"),
        make_doc("charlie", "planar layouts for tiny maps"),
        make_doc("delta", "citation graphs and ranking signals everywhere"),
    ]
    lexicon = build_lexicon(docs)
    tfidf = {d.id: tfidf_vector(d, lexicon) for d in docs}
    index = build_inverted_index(tfidf)
    return docs, lexicon, tfidf, index


class TestQueryVector:
    def test_known_terms(self, searchable):
        _, lexicon, _, _ = searchable
        qv = query_vector("ranking networks", lexicon)
        assert qv is not None and len(qv.entries) == 2

    def test_empty_query(self, searchable):
        _, lexicon, _, _ = searchable
        assert query_vector("", lexicon) is None

    def test_stopwords_only(self, searchable):
        _, lexicon, _, _ = searchable
        assert query_vector("the of and", lexicon) is None

    def test_out_of_lexicon_only(self, searchable):
        _, lexicon, _, _ = searchable
        assert query_vector("zymurgy", lexicon) is None


class TestSearch:
    def test_exact_document_text_scores_one(self, searchable):
        docs, lexicon, _, index = searchable
        results = search(
            "planar layouts for tiny maps", lexicon, index, {}, use_network_ratings=False
        )
        assert results[0].doc_id == "charlie"
        assert results[0].text_score == pytest.approx(1.0, abs=1e-12)
        assert results[0].position == 1

    def test_candidates_need_a_shared_term(self, searchable):
        _, lexicon, _, index = searchable
        results = search("planar", lexicon, index, {}, use_network_ratings=False)
        assert [r.doc_id for r in results] == ["charlie"]

    def test_no_match_returns_empty(self, searchable):
        _, lexicon, _, index = searchable
        assert search("zymurgy", lexicon, index, {}) == []
        assert search("", lexicon, index, {}) == []

    def test_ratings_off_reports_zero_rating(self, searchable):
        _, lexicon, _, index = searchable
        combined = {"alpha": 1.0, "bravo": 1.0, "charlie": 1.0, "delta": 1.0}
        results = search(
            "ranking", lexicon, index, combined, use_network_ratings=False
        )
        assert all(r.network_rating == 0.0 for r in results)
        assert all(r.final_score == pytest.approx(r.text_score) for r in results)

    def test_ratings_off_independent_of_combined_map(self, searchable):
        _, lexicon, _, index = searchable
        with_map = search(
            "ranking networks",
            lexicon,
            index,
            {"alpha": 1.0, "bravo": 0.1},
            use_network_ratings=False,
        )
        without = search("ranking networks", lexicon, index, {}, use_network_ratings=False)
        assert with_map == without

    def test_boost_reorders(self, searchable):
        # bravo beats alpha on text alone; alpha's rating flips the order
        _, lexicon, _, index = searchable
        combined = {"alpha": 1.0, "bravo": 0.05, "charlie": 0.0, "delta": 0.1}
        off = search(
            "ranking networks", lexicon, index, combined, use_network_ratings=False
        )
        on = search("ranking networks", lexicon, index, combined, rating_boost=2.0)
        assert off[0].doc_id == "bravo"
        assert on[0].doc_id == "alpha"

    def test_final_score_formula(self, searchable):
        _, lexicon, _, index = searchable
        combined = {"alpha": 0.8, "bravo": 0.3, "delta": 0.6}
        results = search("ranking", lexicon, index, combined, rating_boost=1.5)
        for r in results:
            want = r.text_score * (1.0 + 1.5 * combined.get(r.doc_id, 0.0))
            assert r.final_score == pytest.approx(want, abs=1e-12)
            assert r.network_rating == combined.get(r.doc_id, 0.0)

    def test_order_matches_oracle(self, searchable):
        _, lexicon, _, index = searchable
        combined = {"alpha": 0.9, "bravo": 0.2, "charlie": 0.5, "delta": 0.7}
        results = search("ranking networks citation", lexicon, index, combined)
        text_scores = {r.doc_id: r.text_score for r in results}
        want = oracles.boosted_order(text_scores, combined, boost=1.0)
        assert [r.doc_id for r in results] == want

    def test_zero_boost_equals_text_order(self, searchable):
        _, lexicon, _, index = searchable
        combined = {"alpha": 1.0, "bravo": 0.0, "charlie": 0.4, "delta": 0.9}
        plain = search("ranking", lexicon, index, {}, use_network_ratings=False)
        zero = search("ranking", lexicon, index, combined, rating_boost=0.0)
        assert [r.doc_id for r in plain] == [r.doc_id for r in zero]

    def test_limit_and_positions(self, searchable):
        _, lexicon, _, index = searchable
        results = search("ranking citation", lexicon, index, {}, limit=2)
        assert len(results) == 2
        assert [r.position for r in results] == [1, 2]

    def test_ties_break_by_doc_id(self):
        docs = [
            make_doc("bbb", "identical body text"),
            make_doc("aaa", "identical body text"),
        ]
        lexicon = build_lexicon(docs)
        tfidf = {d.id: tfidf_vector(d, lexicon) for d in docs}
        index = build_inverted_index(tfidf)
        results = search("identical body", lexicon, index, {}, use_network_ratings=False)
        assert [r.doc_id for r in results] == ["aaa", "bbb"]

    def test_deterministic(self, searchable):
        _, lexicon, _, index = searchable
        combined = {"alpha": 0.9, "bravo": 0.2, "charlie": 0.5, "delta": 0.7}
        a = search("ranking networks", lexicon, index, combined)
        b = search("ranking networks", lexicon, index, combined)
        assert a == b


class TestRelated:
    def test_unknown_doc(self, six_node_graph):
        with pytest.raises(NotFound):
            related(six_node_graph, "ghost")

    def test_isolated_doc_empty(self, six_node_graph):
        assert related(six_node_graph, "n6") == []

    def test_sorted_by_weight(self, six_node_graph):
        assert related(six_node_graph, "n1") == [
            ("n2", 0.9),
            ("n3", 0.7),
            ("n4", 0.55),
        ]

    def test_limit(self, six_node_graph):
        assert related(six_node_graph, "n1", limit=2) == [("n2", 0.9), ("n3", 0.7)]

    def test_weight_ties_break_by_id(self):
        g = SimilarityGraph()
        g.set_edge("hub", "zeta", 0.5)
        g.set_edge("hub", "beta", 0.5)
        assert related(g, "hub") == [("beta", 0.5), ("zeta", 0.5)]


class TestFeed:
    def test_no_history_gets_global_top(self, six_node_graph, combined6):
        items = feed("newcomer", [], six_node_graph, combined6, limit=3)
        assert [i.doc_id for i in items] == ["n1", "n4", "n2"]
        assert all(i.reason is FeedReason.GLOBAL_TOP for i in items)
        assert [i.score for i in items] == [1.0, 0.9, 0.8]

    def test_starred_neighborhood(self, six_node_graph, combined6):
        events = [_event("u1", FeedbackKind.STAR, "n1")]
        items = feed("u1", events, six_node_graph, combined6, limit=3)
        # scores: n2 0.9*0.8=0.72, n4 0.55*0.9=0.495, n3 0.7*0.6=0.42
        assert [i.doc_id for i in items] == ["n2", "n4", "n3"]
        assert all(i.reason is FeedReason.NEIGHBOR_OF_STARRED for i in items)
        assert items[0].score == pytest.approx(0.72)
        assert items[1].score == pytest.approx(0.495)
        assert items[2].score == pytest.approx(0.42)

    def test_interacted_docs_excluded(self, six_node_graph, combined6):
        events = [
            _event("u1", FeedbackKind.STAR, "n1"),
            _event("u1", FeedbackKind.CLICK, "n2"),
        ]
        items = feed("u1", events, six_node_graph, combined6, limit=10)
        ids = [i.doc_id for i in items]
        assert "n1" not in ids and "n2" not in ids

    def test_other_users_events_ignored(self, six_node_graph, combined6):
        events = [_event("u2", FeedbackKind.STAR, "n1")]
        items = feed("u1", events, six_node_graph, combined6, limit=3)
        assert all(i.reason is FeedReason.GLOBAL_TOP for i in items)

    def test_isolated_library_padded_globally(self, six_node_graph, combined6):
        events = [_event("u1", FeedbackKind.LIBRARY_ADD, "n6")]
        items = feed("u1", events, six_node_graph, combined6, limit=3)
        # n6 has no neighbors: fall back to global list, minus n6 itself
        assert [i.doc_id for i in items] == ["n1", "n4", "n2"]
        assert all(i.reason is FeedReason.GLOBAL_TOP for i in items)

    def test_library_neighbors_scored(self, six_node_graph, combined6):
        events = [_event("u1", FeedbackKind.LIBRARY_ADD, "n2")]
        items = feed("u1", events, six_node_graph, combined6, limit=2)
        # neighbors of n2: n1 0.9*1.0=0.9, n5 0.8*0.3=0.24
        assert items[0].doc_id == "n1"
        assert items[0].reason is FeedReason.NEIGHBOR_OF_LIBRARY
        assert items[0].score == pytest.approx(0.9)

    def test_star_outranks_library_on_tie(self, combined6):
        # n3 is adjacent to a starred and a shelved doc with equal scores
        g = SimilarityGraph()
        g.set_edge("s", "n3", 0.5)
        g.set_edge("l", "n3", 0.5)
        combined = {"s": 0.1, "l": 0.1, "n3": 0.5}
        events = [
            _event("u1", FeedbackKind.STAR, "s"),
            _event("u1", FeedbackKind.LIBRARY_ADD, "l"),
        ]
        items = feed("u1", events, g, combined, limit=5)
        n3 = next(i for i in items if i.doc_id == "n3")
        assert n3.reason is FeedReason.NEIGHBOR_OF_STARRED

    def test_best_source_wins(self, combined6):
        g = SimilarityGraph()
        g.set_edge("s", "x", 0.2)
        g.set_edge("l", "x", 0.9)
        combined = {"s": 0.5, "l": 0.5, "x": 0.5}
        events = [
            _event("u1", FeedbackKind.STAR, "s"),
            _event("u1", FeedbackKind.LIBRARY_ADD, "l"),
        ]
        items = feed("u1", events, g, combined, limit=5)
        x = next(i for i in items if i.doc_id == "x")
        # the library edge scores 0.45 > the star edge's 0.1
        assert x.reason is FeedReason.NEIGHBOR_OF_LIBRARY
        assert x.score == pytest.approx(0.45)

    def test_padding_never_duplicates(self, six_node_graph, combined6):
        events = [_event("u1", FeedbackKind.STAR, "n1")]
        items = feed("u1", events, six_node_graph, combined6, limit=10)
        ids = [i.doc_id for i in items]
        assert len(ids) == len(set(ids))
        # global padding fills up with the unseen leftovers
        assert set(ids) == {"n2", "n3", "n4", "n5", "n6"}

    def test_nonpositive_limit_rejected(self, six_node_graph, combined6):
        with pytest.raises(ValueError):
            feed("u1", [], six_node_graph, combined6, limit=0)


class TestRecordImpressions:
    def test_top_slice_recorded(self, tmp_path, searchable):
        _, lexicon, _, index = searchable
        results = search("ranking citation networks", lexicon, index, {})
        store = ImpressionStore(tmp_path)
        record_impressions(store, results, top_r=2)
        shown = [r.doc_id for r in results[:2]]
        for doc_id in shown:
            assert store.get(doc_id).impressions == 1
        for r in results[2:]:
            assert store.get(r.doc_id).impressions == 0

    def test_empty_results_noop(self, tmp_path):
        store = ImpressionStore(tmp_path)
        record_impressions(store, [], top_r=5)
        assert store.all_records() == []


class TestIndexPersistence:
    def test_round_trip(self, searchable, tmp_path):
        _, _, tfidf, index = searchable
        path = tmp_path / "index.json"
        save_index(index, path)
        back = load_index(path)
        assert back == index

    def test_postings_sorted_by_doc(self, searchable):
        _, _, _, index = searchable
        for postings in index.values():
            ids = [doc_id for doc_id, _ in postings]
            assert ids == sorted(ids)
