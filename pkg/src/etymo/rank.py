"""Network ratings: PageRank, reverse PageRank, and their blend.

On the temporally oriented graph an arc points from a newer paper to an
older one, so plain PageRank surfaces influential early work while PageRank
on the reversed graph surfaces recent papers that draw on many strong
older ones.  The combined rating blends both after max-normalization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import EmptyGraph, IdMismatch
from .simnet import SimilarityGraph


@dataclass
class RankConfig:
    damping: float = 0.85
    iterations: int = 10
    beta: float = 0.5              # weight of forward PageRank in the blend
    tol: float | None = None       # optional early-stop on L1 change

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise ValueError("damping must be in (0, 1)")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must be in [0, 1]")
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive when given")


def pagerank(
    graph: SimilarityGraph,
    damping: float = 0.85,
    iterations: int = 10,
    tol: float | None = None,
) -> dict[str, float]:
    """Power iteration for the PageRank vector of a directed graph.

    Starts uniform and applies

        x' = damping * (P^T x + dangling_mass * u) + (1 - damping) * u

    where P is the out-weight-normalized transition matrix, u the uniform
    vector, and dangling_mass the probability currently sitting on nodes
    with no outgoing arcs.  Each sweep is one pass over the arc list, so an
    iteration costs O(arcs).  The iterate keeps summing to 1.

    With `tol` set, iteration stops as soon as the L1 change between
    consecutive iterates drops below it.
    """
    if not graph.directed:
        raise ValueError("pagerank requires the temporally oriented graph")
    nodes = graph.nodes()
    if not nodes:
        raise EmptyGraph("cannot rank an empty graph")
    n = len(nodes)
    arcs = graph.edges()

    out_weight = {u: 0.0 for u in nodes}
    for a, _, w in arcs:
        out_weight[a] += w

    x = {u: 1.0 / n for u in nodes}
    for _ in range(iterations):
        nxt = {u: 0.0 for u in nodes}
        dangling_mass = sum(x[u] for u in nodes if out_weight[u] == 0.0)
        for a, b, w in arcs:
            nxt[b] += x[a] * (w / out_weight[a])
        base = damping * dangling_mass / n + (1.0 - damping) / n
        for u in nodes:
            nxt[u] = damping * nxt[u] + base
        delta = sum(abs(nxt[u] - x[u]) for u in nodes)
        x = nxt
        if tol is not None and delta < tol:
            break
    return x


def reverse_pagerank(
    graph: SimilarityGraph,
    damping: float = 0.85,
    iterations: int = 10,
    tol: float | None = None,
) -> dict[str, float]:
    """PageRank of the arc-reversed graph."""
    return pagerank(graph.reverse(), damping=damping, iterations=iterations, tol=tol)


def combined_rating(
    pr: Mapping[str, float],
    rpr: Mapping[str, float],
    beta: float = 0.5,
) -> dict[str, float]:
    """Blend the two ratings after scaling each so its maximum is 1."""
    if set(pr) != set(rpr):
        raise IdMismatch("pagerank and reverse-pagerank cover different ids")
    if not pr:
        return {}
    max_pr = max(pr.values())
    max_rpr = max(rpr.values())
    return {
        u: beta * (pr[u] / max_pr) + (1.0 - beta) * (rpr[u] / max_rpr) for u in pr
    }


@dataclass
class RankScores:
    pagerank: dict[str, float] = field(default_factory=dict)
    reverse_pagerank: dict[str, float] = field(default_factory=dict)
    combined: dict[str, float] = field(default_factory=dict)

    def ordered(self) -> list[str]:
        """Ids from best to worst combined rating, ties broken by id."""
        return sorted(self.combined, key=lambda u: (-self.combined[u], u))


def compute_ranks(graph: SimilarityGraph, config: RankConfig | None = None) -> RankScores:
    config = config or RankConfig()
    pr = pagerank(graph, config.damping, config.iterations, config.tol)
    rpr = reverse_pagerank(graph, config.damping, config.iterations, config.tol)
    return RankScores(
        pagerank=pr,
        reverse_pagerank=rpr,
        combined=combined_rating(pr, rpr, config.beta),
    )


# -- artifact file ---------------------------------------------------------

def save_ranks(scores: RankScores, path: str | Path) -> None:
    rows = [
        {
            "id": u,
            "pagerank": scores.pagerank[u],
            "reverse_pagerank": scores.reverse_pagerank[u],
            "combined": scores.combined[u],
        }
        for u in scores.ordered()
    ]
    Path(path).write_text(json.dumps(rows, indent=1) + "\n", encoding="utf-8")


def load_ranks(path: str | Path) -> RankScores:
    rows = json.loads(Path(path).read_text(encoding="utf-8"))
    return RankScores(
        pagerank={r["id"]: r["pagerank"] for r in rows},
        reverse_pagerank={r["id"]: r["reverse_pagerank"] for r in rows},
        combined={r["id"]: r["combined"] for r in rows},
    )
