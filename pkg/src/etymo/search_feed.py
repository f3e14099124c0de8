"""Query-time scoring, related-paper lookup, and the per-user feed.

Search is lexical first: a query is mapped to a TF-IDF vector and scored by
cosine against documents sharing at least one query term, found through the
inverted index.  Network ratings then act as a multiplicative boost,
final = text * (1 + boost * combined), so a document with no lexical match
never appears however highly the network rates it.

The feed walks one hop out from the user's starred and library documents
and scores each unseen neighbor by edge weight times combined rating; the
algorithm is this engine's own convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import FeedbackEvent, FeedbackKind, ImpressionStore
from .errors import EmptyVector, NotFound
from .simnet import SimilarityGraph
from .vectorize import SparseVector, TermLexicon, tokenize, weights_from_counts

DEFAULT_RATING_BOOST = 1.0


@dataclass(frozen=True)
class SearchResult:
    doc_id: str
    text_score: float
    network_rating: float
    final_score: float
    position: int


class FeedReason(Enum):
    NEIGHBOR_OF_LIBRARY = "NeighborOfLibrary"
    NEIGHBOR_OF_STARRED = "NeighborOfStarred"
    GLOBAL_TOP = "GlobalTop"


@dataclass(frozen=True)
class FeedItem:
    doc_id: str
    reason: FeedReason
    score: float


# -- inverted index --------------------------------------------------------

def build_inverted_index(
    tfidf: Mapping[str, SparseVector],
) -> dict[int, list[tuple[str, float]]]:
    """term_id -> postings of (doc_id, normalized term weight), doc-sorted."""
    postings: dict[int, list[tuple[str, float]]] = {}
    for doc_id in sorted(tfidf):
        for term_id, weight in tfidf[doc_id].entries.items():
            postings.setdefault(term_id, []).append((doc_id, weight))
    return {tid: sorted(docs) for tid, docs in postings.items()}


def save_index(index: Mapping[int, list[tuple[str, float]]], path: str | Path) -> None:
    payload = {
        str(tid): [[doc_id, w] for doc_id, w in index[tid]] for tid in sorted(index)
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def load_index(path: str | Path) -> dict[int, list[tuple[str, float]]]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return {
        int(tid): [(doc_id, w) for doc_id, w in docs] for tid, docs in payload.items()
    }


# -- search ----------------------------------------------------------------

def query_vector(query: str, lexicon: TermLexicon) -> SparseVector | None:
    """TF-IDF vector for a free-text query; None when no term is known."""
    counts: dict[str, int] = {}
    for token in tokenize(query):
        counts[token] = counts.get(token, 0) + 1
    try:
        return weights_from_counts(counts, lexicon)
    except EmptyVector:
        return None


def search(
    query: str,
    lexicon: TermLexicon,
    index: Mapping[int, list[tuple[str, float]]],
    combined: Mapping[str, float],
    limit: int = 10,
    use_network_ratings: bool = True,
    rating_boost: float = DEFAULT_RATING_BOOST,
) -> list[SearchResult]:
    """Ranked results for a query.

    text_score is the cosine between the query vector and each candidate's
    TF-IDF vector; candidates are exactly the documents sharing a query
    term.  With ratings off, the output depends only on the lexicon and
    index (network_rating is reported as 0).
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    qv = query_vector(query, lexicon)
    if qv is None:
        return []
    text_scores: dict[str, float] = {}
    for term_id in sorted(qv.entries):
        for doc_id, weight in index.get(term_id, ()):
            text_scores[doc_id] = text_scores.get(doc_id, 0.0) + qv.entries[term_id] * weight

    scored = []
    for doc_id in sorted(text_scores):
        text = text_scores[doc_id]
        if use_network_ratings:
            rating = combined.get(doc_id, 0.0)
            final = text * (1.0 + rating_boost * rating)
        else:
            rating = 0.0
            final = text
        scored.append((doc_id, text, rating, final))

    scored.sort(key=lambda row: (-row[3], row[0]))
    return [
        SearchResult(doc_id=d, text_score=t, network_rating=r, final_score=f, position=i)
        for i, (d, t, r, f) in enumerate(scored[:limit], start=1)
    ]


# -- related papers --------------------------------------------------------

def related(graph: SimilarityGraph, doc_id: str, limit: int = 10) -> list[tuple[str, float]]:
    """Graph neighbors of a document, strongest edge first, ties by id."""
    if not graph.has_node(doc_id):
        raise NotFound(f"document {doc_id!r} not in graph")
    neighbors = graph.neighbors(doc_id)
    neighbors.sort(key=lambda pair: (-pair[1], pair[0]))
    return neighbors[:limit]


# -- feed ------------------------------------------------------------------

def feed(
    user: str,
    events: Iterable[FeedbackEvent],
    graph: SimilarityGraph,
    combined: Mapping[str, float],
    limit: int = 10,
) -> list[FeedItem]:
    """Recommendations: unseen 1-hop neighbors of the user's starred and
    library documents, scored edge_weight * combined rating, padded with
    global top-rated documents when the neighborhood runs short.

    A document the user already starred, clicked, or shelved never appears.
    A user with no history gets the pure global list.
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    starred: set[str] = set()
    library: set[str] = set()
    clicked: set[str] = set()
    for ev in events:
        if ev.user != user:
            continue
        if ev.kind is FeedbackKind.STAR:
            starred.add(ev.doc_id)
        elif ev.kind is FeedbackKind.LIBRARY_ADD:
            library.add(ev.doc_id)
        elif ev.kind is FeedbackKind.CLICK:
            clicked.add(ev.doc_id)
    interacted = starred | library | clicked

    # Best-scoring source wins for each candidate; stars outrank libraries
    # on exact ties so the reason stays deterministic.
    candidates: dict[str, tuple[float, FeedReason]] = {}
    for source_set, reason in (
        (starred, FeedReason.NEIGHBOR_OF_STARRED),
        (library, FeedReason.NEIGHBOR_OF_LIBRARY),
    ):
        for source in sorted(source_set):
            if not graph.has_node(source):
                continue
            for neighbor, weight in graph.neighbors(source):
                if neighbor in interacted:
                    continue
                score = weight * combined.get(neighbor, 0.0)
                held = candidates.get(neighbor)
                if held is None or score > held[0]:
                    candidates[neighbor] = (score, reason)

    items = [
        FeedItem(doc_id=d, reason=reason, score=score)
        for d, (score, reason) in candidates.items()
    ]
    items.sort(key=lambda it: (-it.score, it.doc_id))
    items = items[:limit]

    if len(items) < limit:
        seen = {it.doc_id for it in items} | interacted
        for doc_id in sorted(combined, key=lambda d: (-combined[d], d)):
            if doc_id in seen:
                continue
            items.append(FeedItem(doc_id=doc_id, reason=FeedReason.GLOBAL_TOP, score=combined[doc_id]))
            if len(items) == limit:
                break
    return items


# -- impression bookkeeping ------------------------------------------------

def record_impressions(
    store: ImpressionStore, results: Iterable[SearchResult], top_r: int
) -> None:
    """Count one impression for every result shown within the top_r
    positions; deeper results are considered unseen."""
    store.record_impressions(
        [r.doc_id for r in results if r.position <= top_r]
    )
