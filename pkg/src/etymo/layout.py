"""Exact t-SNE layout of document vectors in 2-D.

Stage 1 finds a per-row Gaussian bandwidth by binary search so every
conditional distribution hits the target entropy log2(perplexity), then
symmetrizes into joint affinities P.  Stage 2 runs plain gradient descent
on KL(P || Q) with a Student-t Q, momentum, and early exaggeration.
Everything is O(N^2) per iteration; no tree approximation.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .simnet import SimilarityGraph

ENTROPY_TOL = 1e-5
MAX_BANDWIDTH_STEPS = 50
MOMENTUM_SWITCH_ITER = 250      # also the last exaggerated iteration
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
INIT_SIGMA = 1e-4


@dataclass
class LayoutConfig:
    perplexity: float = 30.0
    learning_rate: float = 200.0
    iterations: int = 500
    early_exaggeration: float = 12.0
    seed: int = 42

    def __post_init__(self):
        if self.perplexity <= 1.0:
            raise ValueError("perplexity must exceed 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.early_exaggeration <= 0:
            raise ValueError("early_exaggeration must be positive")


@dataclass
class Layout:
    coords: dict[str, tuple[float, float]] = field(default_factory=dict)
    # ids whose position is an interim neighbor-centroid guess, not t-SNE output
    approx: set[str] = field(default_factory=set)


def _squared_distances(x: np.ndarray) -> np.ndarray:
    sq = np.sum(x * x, axis=1)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)


def _row_affinities(dist_row: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    """Conditional probabilities for one row at precision beta, and their
    Shannon entropy in bits.  dist_row excludes the self-distance."""
    # shift by the minimum so the nearest neighbor's exponent is 0
    shifted = dist_row - dist_row.min()
    p = np.exp(-shifted * beta)
    p /= p.sum()
    nonzero = p[p > 0.0]
    entropy = float(-np.sum(nonzero * np.log2(nonzero)))
    return p, entropy


def conditional_rows(vectors: np.ndarray, perplexity: float) -> np.ndarray:
    """Row-stochastic conditional affinity matrix (zero diagonal).

    Each row's Gaussian bandwidth is bisected until the conditional
    distribution's entropy is log2(perplexity) within ENTROPY_TOL.  Rows
    where the target is unreachable (e.g. exact duplicate points) keep the
    last bandwidth tried and a RuntimeWarning is issued.
    """
    x = np.asarray(vectors, dtype=float)
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two points for affinities")
    if not perplexity < n:
        raise ValueError("perplexity must be smaller than the point count")
    target = math.log2(perplexity)
    dist = _squared_distances(x)
    cond = np.zeros((n, n))
    mask = ~np.eye(n, dtype=bool)
    for i in range(n):
        row = dist[i][mask[i]]
        beta, beta_lo, beta_hi = 1.0, -math.inf, math.inf
        p, entropy = _row_affinities(row, beta)
        steps = 0
        while abs(entropy - target) > ENTROPY_TOL and steps < MAX_BANDWIDTH_STEPS:
            if entropy > target:
                beta_lo = beta
                beta = beta * 2.0 if beta_hi == math.inf else (beta + beta_hi) / 2.0
            else:
                beta_hi = beta
                beta = beta / 2.0 if beta_lo == -math.inf else (beta + beta_lo) / 2.0
            p, entropy = _row_affinities(row, beta)
            steps += 1
        if abs(entropy - target) > ENTROPY_TOL:
            warnings.warn(
                f"entropy target unreachable for row {i}; bandwidth clamped",
                RuntimeWarning,
                stacklevel=2,
            )
        cond[i][mask[i]] = p
    return cond


def conditional_affinities(vectors: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetric joint affinity matrix for t-SNE: the calibrated conditional
    rows symmetrized as (C + C^T) / (2N)."""
    cond = conditional_rows(vectors, perplexity)
    return (cond + cond.T) / (2.0 * cond.shape[0])


def _student_t_weights(y: np.ndarray) -> np.ndarray:
    w = 1.0 / (1.0 + _squared_distances(y))
    np.fill_diagonal(w, 0.0)
    return w


def kl_divergence(p: np.ndarray, y: np.ndarray) -> float:
    """KL(P || Q) of the embedding y under Student-t similarities."""
    w = _student_t_weights(y)
    q = w / w.sum()
    terms = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0) / np.maximum(q, 1e-300)), 0.0)
    return float(terms.sum())


def kl_gradient(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Analytic gradient of KL(P || Q) with respect to the 2-D points:

        grad_i = 4 * sum_j (p_ij - q_ij) * w_ij * (y_i - y_j)

    with w_ij = 1 / (1 + |y_i - y_j|^2) and q_ij = w_ij / sum w.
    """
    w = _student_t_weights(y)
    q = w / w.sum()
    pq_w = (p - q) * w
    return 4.0 * ((np.diag(pq_w.sum(axis=1)) - pq_w) @ y)


def tsne(vectors: Mapping[str, np.ndarray], config: LayoutConfig | None = None) -> Layout:
    """Lay out documents in 2-D by exact t-SNE.

    Deterministic given the seed.  Perplexity is clamped to (N - 1) / 3 so
    small corpora stay workable; a single document lands at the origin.
    Coordinates are re-centered after every step.
    """
    config = config or LayoutConfig()
    ids = sorted(vectors)
    n = len(ids)
    if n == 0:
        return Layout()
    if n == 1:
        return Layout(coords={ids[0]: (0.0, 0.0)})

    x = np.vstack([np.asarray(vectors[i], dtype=float) for i in ids])
    perplexity = max(1.0 + 1e-9, min(config.perplexity, (n - 1) / 3.0))
    with warnings.catch_warnings():
        if perplexity != config.perplexity:
            # tiny corpora often cannot hit even the clamped target exactly
            warnings.simplefilter("ignore", RuntimeWarning)
        p = conditional_affinities(x, perplexity)

    rng = np.random.default_rng(config.seed)
    y = rng.normal(0.0, INIT_SIGMA, size=(n, 2))
    velocity = np.zeros_like(y)
    for it in range(config.iterations):
        exaggerate = it < MOMENTUM_SWITCH_ITER
        p_eff = p * config.early_exaggeration if exaggerate else p
        grad = kl_gradient(p_eff, y)
        momentum = MOMENTUM_EARLY if it < MOMENTUM_SWITCH_ITER else MOMENTUM_LATE
        velocity = momentum * velocity - config.learning_rate * grad
        y = y + velocity
        y = y - y.mean(axis=0)

    return Layout(coords={doc_id: (float(y[i, 0]), float(y[i, 1])) for i, doc_id in enumerate(ids)})


def place_by_neighbors(layout: Layout, graph: SimilarityGraph, doc_id: str) -> Layout:
    """Interim position for a document inserted between layout runs: the
    edge-weight-weighted centroid of its already-placed neighbors, marked
    approximate.  With no placed neighbor it sits at the origin."""
    total = 0.0
    acc_x = acc_y = 0.0
    for other, w in graph.neighbors(doc_id):
        if other in layout.coords:
            ox, oy = layout.coords[other]
            acc_x += w * ox
            acc_y += w * oy
            total += w
    if total > 0.0:
        layout.coords[doc_id] = (acc_x / total, acc_y / total)
    else:
        layout.coords[doc_id] = (0.0, 0.0)
    layout.approx.add(doc_id)
    return layout


# -- artifact file ---------------------------------------------------------

def save_layout(layout: Layout, path: str | Path) -> None:
    rows = []
    for doc_id in sorted(layout.coords):
        x, y = layout.coords[doc_id]
        row = {"id": doc_id, "x": x, "y": y}
        if doc_id in layout.approx:
            row["approx"] = True
        rows.append(row)
    Path(path).write_text(json.dumps(rows, indent=1) + "\n", encoding="utf-8")


def load_layout(path: str | Path) -> Layout:
    rows = json.loads(Path(path).read_text(encoding="utf-8"))
    layout = Layout()
    for row in rows:
        layout.coords[row["id"]] = (row["x"], row["y"])
        if row.get("approx"):
            layout.approx.add(row["id"])
    return layout
