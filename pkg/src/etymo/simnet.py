"""The adaptive similarity network over documents.

Nodes are documents; a pair is linked when the blended cosine similarity of
their TF-IDF and dense vectors exceeds the threshold alpha.  The network is
built undirected, reshaped by user feedback (stars, libraries, click rates),
and finally oriented by publication date so that a newer paper points at the
older ones it resembles.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .corpus import FeedbackEvent, FeedbackKind, ImpressionRecord
from .errors import DuplicateNode, IdMismatch, MissingDate, NotFound
from .vectorize import SparseVector, cosine_similarity

# A click rate is only judged once a document has been shown this many times.
MIN_IMPRESSIONS_FOR_DEMOTION = 20


@dataclass
class GraphConfig:
    alpha: float = 0.5            # similarity threshold for linking
    mu: float = 0.5               # blend: mu * tfidf cosine + (1 - mu) * dense cosine
    k: int = 100                  # representative-subset size for incremental insertion
    gamma_star: float = 0.05      # multiplicative star bump
    delta_lib: float = 0.05       # additive library bump / creation weight
    ctr_threshold: float = 0.02   # click rate below this is "poor"
    top_r: int = 10               # result-list depth counted as an impression
    demote_factor: float = 0.8    # incident-edge multiplier for demoted docs
    prune_floor: float = 0.05     # edges at or below this weight are removed
    weight_cap: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must be in [0, 1]")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.gamma_star < 0 or self.delta_lib < 0 or self.prune_floor < 0:
            raise ValueError("gamma_star, delta_lib, prune_floor must be >= 0")
        if not 0.0 < self.ctr_threshold < 1.0:
            raise ValueError("ctr_threshold must be in (0, 1)")
        if self.top_r < 1:
            raise ValueError("top_r must be positive")
        if not 0.0 < self.demote_factor < 1.0:
            raise ValueError("demote_factor must be in (0, 1)")


class SimilarityGraph:
    """Weighted graph over document ids.

    Undirected while being built and adapted (edges keyed (a, b) with a < b),
    directed after temporal orientation (edges are (source, target) arcs).
    Self-loops are never allowed.
    """

    def __init__(self, directed: bool = False):
        self.directed = directed
        self._nodes: set[str] = set()
        self._edges: dict[tuple[str, str], float] = {}
        self._adj: dict[str, set[str]] = {}

    def _key(self, a: str, b: str) -> tuple[str, str]:
        if self.directed:
            return (a, b)
        return (a, b) if a < b else (b, a)

    # -- nodes -------------------------------------------------------------

    def add_node(self, node: str) -> None:
        self._nodes.add(node)
        self._adj.setdefault(node, set())

    def has_node(self, node: str) -> bool:
        return node in self._nodes

    def nodes(self) -> list[str]:
        return sorted(self._nodes)

    def node_count(self) -> int:
        return len(self._nodes)

    # -- edges -------------------------------------------------------------

    def set_edge(self, a: str, b: str, weight: float) -> None:
        if a == b:
            raise ValueError(f"self-loop on {a!r} not allowed")
        self.add_node(a)
        self.add_node(b)
        self._edges[self._key(a, b)] = weight
        self._adj[a].add(b)
        self._adj[b].add(a)

    def remove_edge(self, a: str, b: str) -> None:
        del self._edges[self._key(a, b)]
        if self.directed and (b, a) in self._edges:
            return  # the opposite arc still connects them
        self._adj[a].discard(b)
        self._adj[b].discard(a)

    def weight(self, a: str, b: str) -> float | None:
        return self._edges.get(self._key(a, b))

    def has_edge(self, a: str, b: str) -> bool:
        return self._key(a, b) in self._edges

    def edges(self) -> list[tuple[str, str, float]]:
        return [(a, b, w) for (a, b), w in sorted(self._edges.items())]

    def edge_count(self) -> int:
        return len(self._edges)

    def neighbors(self, node: str) -> list[tuple[str, float]]:
        """Adjacent nodes with edge weights, ignoring direction."""
        if node not in self._nodes:
            raise NotFound(f"node {node!r} not in graph")
        out = []
        for other in sorted(self._adj[node]):
            w = self._edges.get(self._key(node, other))
            if w is None:
                w = self._edges.get(self._key(other, node))
            out.append((other, w))
        return out

    def incident_edges(self, node: str) -> list[tuple[str, str]]:
        """Edge keys touching node, in deterministic order."""
        keys = []
        for other in sorted(self._adj.get(node, ())):
            for key in (self._key(node, other), self._key(other, node)):
                if key in self._edges and key not in keys:
                    keys.append(key)
        return keys

    def out_edges(self, node: str) -> list[tuple[str, float]]:
        if not self.directed:
            raise ValueError("out_edges requires a directed graph")
        return [
            ((b, w)) for (a, b), w in sorted(self._edges.items()) if a == node
        ]

    # -- whole-graph transforms -------------------------------------------

    def copy(self) -> "SimilarityGraph":
        g = SimilarityGraph(directed=self.directed)
        g._nodes = set(self._nodes)
        g._edges = dict(self._edges)
        g._adj = {n: set(s) for n, s in self._adj.items()}
        return g

    def reverse(self) -> "SimilarityGraph":
        if not self.directed:
            raise ValueError("reverse requires a directed graph")
        g = SimilarityGraph(directed=True)
        for n in self._nodes:
            g.add_node(n)
        for (a, b), w in self._edges.items():
            g.set_edge(b, a, w)
        return g

    def undirected_projection(self) -> "SimilarityGraph":
        """Collapse arcs to undirected edges (mirror arcs carry equal weight)."""
        g = SimilarityGraph(directed=False)
        for n in self._nodes:
            g.add_node(n)
        for (a, b), w in self._edges.items():
            g.set_edge(a, b, w)
        return g


def pair_similarity(
    a: str,
    b: str,
    tfidf: Mapping[str, SparseVector],
    dense: Mapping[str, np.ndarray],
    mu: float,
) -> float:
    """Blend of the TF-IDF and dense cosine similarities for one pair."""
    if mu == 1.0:
        return cosine_similarity(tfidf[a], tfidf[b])
    if mu == 0.0:
        return cosine_similarity(dense[a], dense[b])
    return mu * cosine_similarity(tfidf[a], tfidf[b]) + (1.0 - mu) * cosine_similarity(
        dense[a], dense[b]
    )


def _tfidf_matrix(ids: list[str], tfidf: Mapping[str, SparseVector], dim: int) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for i, doc_id in enumerate(ids):
        for tid, w in tfidf[doc_id].entries.items():
            rows.append(i)
            cols.append(tid)
            vals.append(w)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(len(ids), dim))
    norms = np.sqrt(mat.multiply(mat).sum(axis=1)).A1
    if np.any(norms == 0):
        raise IdMismatch("a TF-IDF vector has zero norm")
    inv = sp.diags(1.0 / norms)
    return inv @ mat


def _dense_matrix(ids: list[str], dense: Mapping[str, np.ndarray]) -> np.ndarray:
    mat = np.vstack([np.asarray(dense[i], dtype=float) for i in ids])
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0):
        raise IdMismatch("a dense vector has zero norm")
    return mat / norms[:, None]


def build_graph(
    tfidf: Mapping[str, SparseVector],
    dense: Mapping[str, np.ndarray],
    config: GraphConfig,
) -> SimilarityGraph:
    """Exact all-pairs construction of the undirected similarity network.

    For every unordered pair the blended similarity
    s = mu * cos_tfidf + (1 - mu) * cos_dense is computed; an edge with
    weight min(s, 1) is created iff s > alpha.
    """
    if set(tfidf) != set(dense):
        raise IdMismatch(
            f"TF-IDF ids and dense ids differ: {sorted(set(tfidf) ^ set(dense))[:5]} ..."
        )
    ids = sorted(tfidf)
    graph = SimilarityGraph(directed=False)
    for doc_id in ids:
        graph.add_node(doc_id)
    n = len(ids)
    if n < 2:
        return graph

    sim = np.zeros((n, n))
    if config.mu > 0.0:
        dim = max((max(v.entries) for v in tfidf.values() if v.entries), default=0) + 1
        xt = _tfidf_matrix(ids, tfidf, dim)
        sim += config.mu * (xt @ xt.T).toarray()
    if config.mu < 1.0:
        xd = _dense_matrix(ids, dense)
        sim += (1.0 - config.mu) * (xd @ xd.T)

    for i in range(n):
        for j in range(i + 1, n):
            s = sim[i, j]
            if s > config.alpha:
                graph.set_edge(ids[i], ids[j], min(s, config.weight_cap))
    return graph


def _combined_of(ranks) -> Mapping[str, float]:
    return getattr(ranks, "combined", ranks)


def top_k_representatives(graph: SimilarityGraph, ranks, k: int) -> list[str]:
    """The k highest combined-rating nodes of the graph, ties broken by id."""
    combined = _combined_of(ranks)
    return sorted(graph.nodes(), key=lambda n: (-combined.get(n, 0.0), n))[:k]


def insert_paper(
    graph: SimilarityGraph,
    ranks,
    new_id: str,
    tfidf: Mapping[str, SparseVector],
    dense: Mapping[str, np.ndarray],
    config: GraphConfig,
) -> SimilarityGraph:
    """Incrementally add one document, comparing it only against the top-k
    ranked nodes instead of the whole graph (cost O(k n) per insertion).

    `ranks` is the rating computed on the current graph, either a RankScores
    or a plain id -> combined-rating mapping.  Mutates and returns `graph`.
    """
    if graph.directed:
        raise ValueError("insertion requires the undirected graph")
    if graph.has_node(new_id):
        raise DuplicateNode(f"node {new_id!r} already in graph")
    if new_id not in tfidf or new_id not in dense:
        raise IdMismatch(f"no vectors for {new_id!r}")
    candidates = top_k_representatives(graph, ranks, config.k)
    graph.add_node(new_id)
    for other in candidates:
        if other not in tfidf or other not in dense:
            raise IdMismatch(f"no vectors for candidate {other!r}")
        s = pair_similarity(new_id, other, tfidf, dense, config.mu)
        if s > config.alpha:
            graph.set_edge(new_id, other, min(s, config.weight_cap))
    return graph


def apply_feedback(
    graph: SimilarityGraph,
    events: Iterable[FeedbackEvent],
    impressions: Iterable[ImpressionRecord],
    ranks,
    config: GraphConfig,
    tfidf: Mapping[str, SparseVector] | None = None,
    dense: Mapping[str, np.ndarray] | None = None,
) -> SimilarityGraph:
    """Reshape the undirected network from user feedback, in three rules.

    1. Stars: each star multiplies the starred document's incident edge
       weights by (1 + gamma_star), capped at 1.  A starred document's
       linking threshold is also lowered to alpha * (1 - gamma_star * stars),
       floored at alpha / 2, and previously sub-threshold pairs whose
       similarity clears the lowered bar become new edges (this needs the
       vector maps; without them the discovery step is skipped).
    2. Libraries: every pair of documents inside one user's library gets an
       additive bump of delta_lib (created at weight delta_lib if absent).
    3. Click demotion: a document ranked in the top_r by combined rating
       with at least MIN_IMPRESSIONS_FOR_DEMOTION impressions and a click
       rate below ctr_threshold has all incident edges scaled by
       demote_factor.

    Edges at or below prune_floor are removed afterwards.  Mutates and
    returns `graph`.
    """
    if graph.directed:
        raise ValueError("feedback applies to the undirected graph")
    events = list(events)
    for ev in events:
        if not graph.has_node(ev.doc_id):
            raise NotFound(f"feedback references unknown node {ev.doc_id!r}")

    cap = config.weight_cap

    # Rule 1: star bumps, in event order.
    star_counts: dict[str, int] = {}
    for ev in events:
        if ev.kind is not FeedbackKind.STAR:
            continue
        star_counts[ev.doc_id] = star_counts.get(ev.doc_id, 0) + 1
        for key in graph.incident_edges(ev.doc_id):
            graph._edges[key] = min(graph._edges[key] * (1.0 + config.gamma_star), cap)

    # Rule 1, edge discovery under the lowered per-node threshold.
    if tfidf is not None and dense is not None:
        for doc_id in sorted(star_counts):
            lowered = max(
                config.alpha * (1.0 - config.gamma_star * star_counts[doc_id]),
                config.alpha / 2.0,
            )
            for other in graph.nodes():
                if other == doc_id or graph.has_edge(doc_id, other):
                    continue
                s = pair_similarity(doc_id, other, tfidf, dense, config.mu)
                if lowered < s < config.alpha:
                    graph.set_edge(doc_id, other, min(s, cap))

    # Rule 2: library co-membership bumps.
    libraries: dict[str, set[str]] = {}
    for ev in events:
        if ev.kind is FeedbackKind.LIBRARY_ADD:
            libraries.setdefault(ev.user, set()).add(ev.doc_id)
    for user in sorted(libraries):
        members = sorted(libraries[user])
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                a, b = members[i], members[j]
                w = graph.weight(a, b)
                if w is None:
                    graph.set_edge(a, b, min(config.delta_lib, cap))
                else:
                    graph.set_edge(a, b, min(w + config.delta_lib, cap))

    # Rule 3: click-rate demotion of highly ranked documents.
    combined = _combined_of(ranks)
    by_rating = sorted(graph.nodes(), key=lambda n: (-combined.get(n, 0.0), n))
    top_set = set(by_rating[: config.top_r])
    impression_map = {rec.doc_id: rec for rec in impressions}
    for doc_id in sorted(top_set):
        rec = impression_map.get(doc_id)
        if rec is None or rec.impressions < MIN_IMPRESSIONS_FOR_DEMOTION:
            continue
        if rec.clicks / rec.impressions < config.ctr_threshold:
            for key in graph.incident_edges(doc_id):
                graph._edges[key] = graph._edges[key] * config.demote_factor

    # Prune near-dead edges.
    for a, b, w in graph.edges():
        if w <= config.prune_floor:
            graph.remove_edge(a, b)
    return graph


def orient_temporal(graph: SimilarityGraph, dates: Mapping[str, date]) -> SimilarityGraph:
    """Direct every edge from the newer paper to the older one it resembles.

    Papers published on the same day get arcs in both directions, each
    keeping the original weight.
    """
    if graph.directed:
        raise ValueError("graph is already directed")
    for node in graph.nodes():
        if node not in dates:
            raise MissingDate(f"no publication date for {node!r}")
    directed = SimilarityGraph(directed=True)
    for node in graph.nodes():
        directed.add_node(node)
    for a, b, w in graph.edges():
        da, db = dates[a], dates[b]
        if da > db:
            directed.set_edge(a, b, w)
        elif db > da:
            directed.set_edge(b, a, w)
        else:
            directed.set_edge(a, b, w)
            directed.set_edge(b, a, w)
    return directed


# -- artifact file ---------------------------------------------------------

def save_graph(graph: SimilarityGraph, config: GraphConfig, path: str | Path) -> None:
    """Canonical, diff-stable graph file.  A nodes list is included so that
    isolated documents survive a round trip."""
    payload = {
        "directed": graph.directed,
        "config": asdict(config),
        "nodes": graph.nodes(),
        "edges": [{"a": a, "b": b, "w": w} for a, b, w in graph.edges()],
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def load_graph(path: str | Path) -> tuple[SimilarityGraph, GraphConfig]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    graph = SimilarityGraph(directed=payload["directed"])
    for node in payload["nodes"]:
        graph.add_node(node)
    for edge in payload["edges"]:
        graph.set_edge(edge["a"], edge["b"], edge["w"])
    return graph, GraphConfig(**payload["config"])
