"""Etymo: a document discovery engine.

Builds an adaptive cosine-similarity network over a text corpus, rates
documents with PageRank and Reverse PageRank on the temporally oriented
network, lays them out in 2-D with exact t-SNE, and serves search, related
papers, and a per-user feed over HTTP.  User feedback (stars, library adds,
click rates) reshapes the network at each rebuild.
"""

from .corpus import (
    Document,
    DocumentStore,
    FeedbackEvent,
    FeedbackKind,
    ImpressionRecord,
    ImpressionStore,
)
from .errors import (
    DuplicateId,
    DuplicateNode,
    EmptyCorpus,
    EmptyGraph,
    EmptyVector,
    EtymoError,
    IdMismatch,
    MissingDate,
    MissingPrerequisite,
    NotFound,
    SchemaError,
    StaleArtifact,
    ZeroNorm,
)
from .layout import Layout, LayoutConfig, conditional_affinities, conditional_rows, tsne
from .pipeline import (
    PipelineConfig,
    Snapshot,
    build_all,
    insert_documents,
    load_config,
    load_snapshot,
    run_stage,
)
from .rank import RankConfig, RankScores, combined_rating, compute_ranks, pagerank, reverse_pagerank
from .search_feed import FeedItem, FeedReason, SearchResult, feed, related, search
from .simnet import (
    GraphConfig,
    SimilarityGraph,
    apply_feedback,
    build_graph,
    insert_paper,
    orient_temporal,
)
from .vectorize import (
    SparseVector,
    TermLexicon,
    build_lexicon,
    cosine_similarity,
    embed,
    tfidf_vector,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "Document",
    "DocumentStore",
    "FeedbackEvent",
    "FeedbackKind",
    "ImpressionRecord",
    "ImpressionStore",
    "EtymoError",
    "DuplicateId",
    "DuplicateNode",
    "EmptyCorpus",
    "EmptyGraph",
    "EmptyVector",
    "IdMismatch",
    "MissingDate",
    "MissingPrerequisite",
    "NotFound",
    "SchemaError",
    "StaleArtifact",
    "ZeroNorm",
    "TermLexicon",
    "SparseVector",
    "tokenize",
    "build_lexicon",
    "tfidf_vector",
    "embed",
    "cosine_similarity",
    "GraphConfig",
    "SimilarityGraph",
    "build_graph",
    "insert_paper",
    "apply_feedback",
    "orient_temporal",
    "RankConfig",
    "RankScores",
    "pagerank",
    "reverse_pagerank",
    "combined_rating",
    "compute_ranks",
    "LayoutConfig",
    "Layout",
    "conditional_affinities",
    "conditional_rows",
    "tsne",
    "SearchResult",
    "FeedItem",
    "FeedReason",
    "search",
    "related",
    "feed",
    "PipelineConfig",
    "Snapshot",
    "build_all",
    "run_stage",
    "insert_documents",
    "load_config",
    "load_snapshot",
]
