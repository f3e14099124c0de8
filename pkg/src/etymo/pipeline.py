"""Build pipeline: stage DAG, manifest bookkeeping, and artifact snapshots.

Stages run in dependency order

    lexicon -> vectors -> graph -> rank -> layout

and every artifact a stage writes is a pure function of the source data
(documents, feedback, impressions) plus the configuration, so two builds
over identical inputs are byte-identical.  The manifest records a content
hash for each artifact; a stage refuses to run against an input whose disk
content no longer matches what the pipeline last wrote, unless forced.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import search_feed, vectorize
from .corpus import DocumentStore, ImpressionStore
from .errors import MissingPrerequisite, StaleArtifact
from .layout import Layout, LayoutConfig, load_layout, place_by_neighbors, save_layout, tsne
from .rank import RankConfig, RankScores, compute_ranks, load_ranks, save_ranks
from .simnet import (
    GraphConfig,
    SimilarityGraph,
    apply_feedback,
    build_graph,
    insert_paper,
    load_graph,
    orient_temporal,
    save_graph,
)
from .vectorize import SparseVector, TermLexicon, build_lexicon, embed_tfidf, tfidf_vector

MANIFEST_FILE = "manifest.json"
CONFIG_FILE = "etymo.toml"
EXTERNAL_EMBEDDINGS_FILE = "embeddings.jsonl"

STAGES = ("lexicon", "vectors", "graph", "rank", "layout")

# artifact files each stage writes
STAGE_OUTPUTS: dict[str, tuple[str, ...]] = {
    "lexicon": ("lexicon.json",),
    "vectors": ("vectors_tfidf.jsonl", "vectors_dense.jsonl", "index.json"),
    "graph": ("graph.json",),
    "rank": ("ranks.json",),
    "layout": ("layout.json",),
}

# pipeline artifacts each stage reads (source data files are read too, but
# they are the source of truth and can never be stale)
STAGE_INPUTS: dict[str, tuple[str, ...]] = {
    "lexicon": (),
    "vectors": ("lexicon.json",),
    "graph": ("vectors_tfidf.jsonl", "vectors_dense.jsonl"),
    "rank": ("graph.json",),
    "layout": ("vectors_dense.jsonl",),
}


@dataclass
class EmbedConfig:
    n: int = 256
    seed: int = 42

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("embedding dimension must be positive")


@dataclass
class SearchConfig:
    rating_boost: float = search_feed.DEFAULT_RATING_BOOST

    def __post_init__(self):
        if self.rating_boost < 0:
            raise ValueError("rating_boost must be >= 0")


@dataclass
class PipelineConfig:
    graph: GraphConfig = field(default_factory=GraphConfig)
    rank: RankConfig = field(default_factory=RankConfig)
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    embed: EmbedConfig = field(default_factory=EmbedConfig)
    search: SearchConfig = field(default_factory=SearchConfig)

    def to_dict(self) -> dict:
        return {
            "graph": asdict(self.graph),
            "rank": asdict(self.rank),
            "layout": asdict(self.layout),
            "embed": asdict(self.embed),
            "search": asdict(self.search),
        }


_CONFIG_SECTIONS = {
    "graph": GraphConfig,
    "rank": RankConfig,
    "layout": LayoutConfig,
    "embed": EmbedConfig,
    "search": SearchConfig,
}


def load_config(data_dir: str | Path) -> PipelineConfig:
    """Configuration from <data_dir>/etymo.toml, defaults where absent.

    Sections [graph], [rank], [layout], [embed], [search] mirror the config
    dataclasses one to one; an unknown section or key is an error so every
    knob stays auditable.
    """
    path = Path(data_dir) / CONFIG_FILE
    if not path.exists():
        return PipelineConfig()
    with path.open("rb") as fh:
        raw = tomllib.load(fh)
    kwargs = {}
    for section, value in raw.items():
        cls = _CONFIG_SECTIONS.get(section)
        if cls is None:
            raise ValueError(f"unknown config section [{section}] in {path}")
        known = {f.name for f in fields(cls)}
        unknown = set(value) - known
        if unknown:
            raise ValueError(
                f"unknown key(s) {sorted(unknown)} in [{section}] of {path}"
            )
        kwargs[section] = cls(**value)
    return PipelineConfig(**kwargs)


# -- manifest --------------------------------------------------------------

def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def load_manifest(data_dir: str | Path) -> dict:
    path = Path(data_dir) / MANIFEST_FILE
    if not path.exists():
        return {"version": 0, "stages": {}, "artifacts": {}, "config": {}}
    return json.loads(path.read_text(encoding="utf-8"))


def save_manifest(manifest: dict, data_dir: str | Path) -> None:
    path = Path(data_dir) / MANIFEST_FILE
    path.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")


def _record_outputs(manifest: dict, data_dir: Path, stage: str, inputs: dict[str, str]) -> None:
    manifest.setdefault("stages", {})[stage] = {
        "completed_at": datetime.now(timezone.utc).isoformat(),
        "inputs": inputs,
    }
    for name in STAGE_OUTPUTS[stage]:
        manifest.setdefault("artifacts", {})[name] = file_sha256(data_dir / name)


def _check_inputs(manifest: dict, data_dir: Path, stage: str, force: bool) -> dict[str, str]:
    """Verify the stage's pipeline inputs exist and are the generation the
    manifest knows about; returns their current hashes."""
    hashes = {}
    for name in STAGE_INPUTS[stage]:
        path = data_dir / name
        if not path.exists():
            raise MissingPrerequisite(stage, f"input artifact {name} is missing; build its stage first")
        current = file_sha256(path)
        recorded = manifest.get("artifacts", {}).get(name)
        if not force and recorded is not None and recorded != current:
            raise StaleArtifact(
                stage,
                f"input artifact {name} changed outside the pipeline (rerun its stage or pass --force)",
            )
        if not force and recorded is None:
            raise StaleArtifact(
                stage,
                f"input artifact {name} is not tracked by the manifest (rebuild upstream or pass --force)",
            )
        hashes[name] = current
    return hashes


def _source_hashes(data_dir: Path) -> dict[str, str]:
    out = {}
    for name in ("documents.jsonl", "feedback.jsonl", "impressions.jsonl"):
        path = data_dir / name
        if path.exists():
            out[name] = file_sha256(path)
    return out


# -- stage bodies ----------------------------------------------------------

def _stage_lexicon(data_dir: Path, config: PipelineConfig) -> None:
    store = DocumentStore(data_dir)
    if not store.documents_path.exists() or len(store) == 0:
        raise MissingPrerequisite("lexicon", "no documents ingested yet (run ingest first)")
    lexicon = build_lexicon(store.all_documents())
    vectorize.save_lexicon(lexicon, data_dir / "lexicon.json")


def _stage_vectors(data_dir: Path, config: PipelineConfig) -> None:
    store = DocumentStore(data_dir)
    lexicon = vectorize.load_lexicon(data_dir / "lexicon.json")
    docs = store.all_documents()
    tfidf = {doc.id: tfidf_vector(doc, lexicon) for doc in docs}

    external_path = data_dir / EXTERNAL_EMBEDDINGS_FILE
    if external_path.exists():
        dense = vectorize.load_external_embeddings(external_path, config.embed.n)
        missing = set(tfidf) - set(dense)
        if missing:
            raise MissingPrerequisite(
                "vectors",
                f"external embeddings missing {len(missing)} document(s), e.g. {sorted(missing)[:3]}",
            )
        dense = {doc.id: dense[doc.id] for doc in docs}
    else:
        dense = {
            doc.id: embed_tfidf(tfidf[doc.id], n=config.embed.n, seed=config.embed.seed)
            for doc in docs
        }

    vectorize.save_tfidf_vectors(tfidf, data_dir / "vectors_tfidf.jsonl")
    vectorize.save_dense_vectors(dense, data_dir / "vectors_dense.jsonl")
    search_feed.save_index(search_feed.build_inverted_index(tfidf), data_dir / "index.json")


def _adapted_oriented_graph(
    data_dir: Path,
    config: PipelineConfig,
    tfidf: Mapping[str, SparseVector],
    dense: Mapping[str, np.ndarray],
) -> SimilarityGraph:
    store = DocumentStore(data_dir)
    dates = {doc.id: doc.published for doc in store.all_documents()}
    graph = build_graph(tfidf, dense, config.graph)

    # The click-demotion rule needs ratings.  They are computed here on the
    # pre-feedback oriented graph, so the whole build stays a function of
    # the source data alone (a prior build's ranks would break that).
    provisional = compute_ranks(orient_temporal(graph, dates), config.rank)

    events = store.list_feedback()
    impressions = ImpressionStore(data_dir).all_records()
    graph = apply_feedback(
        graph, events, impressions, provisional, config.graph, tfidf=tfidf, dense=dense
    )
    return orient_temporal(graph, dates)


def _stage_graph(data_dir: Path, config: PipelineConfig) -> None:
    tfidf = vectorize.load_tfidf_vectors(data_dir / "vectors_tfidf.jsonl")
    dense = vectorize.load_dense_vectors(data_dir / "vectors_dense.jsonl")
    directed = _adapted_oriented_graph(data_dir, config, tfidf, dense)
    save_graph(directed, config.graph, data_dir / "graph.json")


def _stage_rank(data_dir: Path, config: PipelineConfig) -> None:
    graph, _ = load_graph(data_dir / "graph.json")
    scores = compute_ranks(graph, config.rank)
    save_ranks(scores, data_dir / "ranks.json")


def _stage_layout(data_dir: Path, config: PipelineConfig) -> None:
    dense = vectorize.load_dense_vectors(data_dir / "vectors_dense.jsonl")
    layout = tsne(dense, config.layout)
    save_layout(layout, data_dir / "layout.json")


_STAGE_BODIES = {
    "lexicon": _stage_lexicon,
    "vectors": _stage_vectors,
    "graph": _stage_graph,
    "rank": _stage_rank,
    "layout": _stage_layout,
}


def run_stage(
    data_dir: str | Path,
    stage: str,
    config: PipelineConfig | None = None,
    force: bool = False,
) -> dict:
    """Run one stage (inputs permitting) and update the manifest."""
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    data_dir = Path(data_dir)
    config = config or load_config(data_dir)
    manifest = load_manifest(data_dir)
    inputs = _check_inputs(manifest, data_dir, stage, force)
    inputs.update(_source_hashes(data_dir))
    _STAGE_BODIES[stage](data_dir, config)
    _record_outputs(manifest, data_dir, stage, inputs)
    manifest["config"] = config.to_dict()
    save_manifest(manifest, data_dir)
    return manifest


def build_all(data_dir: str | Path, config: PipelineConfig | None = None, force: bool = False) -> dict:
    """Run every stage in order and bump the build version by one."""
    data_dir = Path(data_dir)
    config = config or load_config(data_dir)
    manifest = load_manifest(data_dir)
    for stage in STAGES:
        inputs = _check_inputs(manifest, data_dir, stage, force)
        inputs.update(_source_hashes(data_dir))
        _STAGE_BODIES[stage](data_dir, config)
        _record_outputs(manifest, data_dir, stage, inputs)
    manifest["version"] = int(manifest.get("version", 0)) + 1
    manifest["built_at"] = datetime.now(timezone.utc).isoformat()
    manifest["config"] = config.to_dict()
    save_manifest(manifest, data_dir)
    return manifest


# -- incremental insertion -------------------------------------------------

def insert_documents(data_dir: str | Path, path: str | Path, config: PipelineConfig | None = None) -> dict:
    """Add documents without a full rebuild.

    New documents are vectorized against the existing lexicon (novel terms
    are simply unknown until the next full build), linked into the graph by
    comparison against the top-k rated nodes, and given an interim layout
    position at the weighted centroid of their neighbors.  Ranks are left
    untouched; an inserted document has no rating until the next build.
    """
    data_dir = Path(data_dir)
    config = config or load_config(data_dir)
    for name in ("lexicon.json", "vectors_tfidf.jsonl", "vectors_dense.jsonl", "graph.json", "ranks.json"):
        if not (data_dir / name).exists():
            raise MissingPrerequisite("insert", f"artifact {name} is missing; run a full build first")

    store = DocumentStore(data_dir)
    before = {doc.id for doc in store.all_documents()}
    store.ingest_documents(path)
    new_ids = sorted(doc.id for doc in store.all_documents() if doc.id not in before)

    lexicon = vectorize.load_lexicon(data_dir / "lexicon.json")
    tfidf = vectorize.load_tfidf_vectors(data_dir / "vectors_tfidf.jsonl")
    dense = vectorize.load_dense_vectors(data_dir / "vectors_dense.jsonl")
    directed, graph_config = load_graph(data_dir / "graph.json")
    ranks = load_ranks(data_dir / "ranks.json")
    layout_path = data_dir / "layout.json"
    layout = load_layout(layout_path) if layout_path.exists() else None

    undirected = directed.undirected_projection() if directed.directed else directed
    dates = {doc.id: doc.published for doc in store.all_documents()}

    external_path = data_dir / EXTERNAL_EMBEDDINGS_FILE
    external = (
        vectorize.load_external_embeddings(external_path, config.embed.n)
        if external_path.exists()
        else None
    )

    inserted = []
    for doc_id in new_ids:
        doc = store.get_document(doc_id)
        tfidf[doc_id] = tfidf_vector(doc, lexicon)
        if external is not None:
            if doc_id not in external:
                raise MissingPrerequisite("insert", f"external embeddings lack {doc_id!r}")
            dense[doc_id] = external[doc_id]
        else:
            dense[doc_id] = embed_tfidf(tfidf[doc_id], n=config.embed.n, seed=config.embed.seed)
        insert_paper(undirected, ranks, doc_id, tfidf, dense, config.graph)
        inserted.append({"id": doc_id, "edges": len(undirected.neighbors(doc_id))})

    directed = orient_temporal(undirected, dates)

    vectorize.save_tfidf_vectors(tfidf, data_dir / "vectors_tfidf.jsonl")
    vectorize.save_dense_vectors(dense, data_dir / "vectors_dense.jsonl")
    search_feed.save_index(search_feed.build_inverted_index(tfidf), data_dir / "index.json")
    save_graph(directed, graph_config, data_dir / "graph.json")
    if layout is not None:
        for doc_id in new_ids:
            place_by_neighbors(layout, directed, doc_id)
        save_layout(layout, layout_path)

    manifest = load_manifest(data_dir)
    for name in ("vectors_tfidf.jsonl", "vectors_dense.jsonl", "index.json", "graph.json"):
        manifest.setdefault("artifacts", {})[name] = file_sha256(data_dir / name)
    if layout is not None:
        manifest["artifacts"]["layout.json"] = file_sha256(layout_path)
    save_manifest(manifest, data_dir)
    return {"inserted": inserted}


# -- serving snapshot ------------------------------------------------------

@dataclass
class Snapshot:
    """One consistent, immutable view of all build artifacts."""

    version: int
    data_dir: Path
    store: DocumentStore
    impressions: ImpressionStore
    config: PipelineConfig
    lexicon: TermLexicon
    tfidf: dict[str, SparseVector]
    dense: dict[str, np.ndarray]
    index: dict[int, list[tuple[str, float]]]
    graph: SimilarityGraph
    ranks: RankScores
    layout: Layout


def load_snapshot(data_dir: str | Path) -> Snapshot:
    """Load every artifact of the latest build; raises MissingPrerequisite
    naming the stage whose output is absent."""
    data_dir = Path(data_dir)
    stage_by_artifact = [
        ("lexicon.json", "lexicon"),
        ("vectors_tfidf.jsonl", "vectors"),
        ("vectors_dense.jsonl", "vectors"),
        ("index.json", "vectors"),
        ("graph.json", "graph"),
        ("ranks.json", "rank"),
        ("layout.json", "layout"),
    ]
    for name, stage in stage_by_artifact:
        if not (data_dir / name).exists():
            raise MissingPrerequisite(stage, f"artifact {name} is missing; run a build first")
    manifest = load_manifest(data_dir)
    graph, _ = load_graph(data_dir / "graph.json")
    return Snapshot(
        version=int(manifest.get("version", 0)),
        data_dir=data_dir,
        store=DocumentStore(data_dir),
        impressions=ImpressionStore(data_dir),
        config=load_config(data_dir),
        lexicon=vectorize.load_lexicon(data_dir / "lexicon.json"),
        tfidf=vectorize.load_tfidf_vectors(data_dir / "vectors_tfidf.jsonl"),
        dense=vectorize.load_dense_vectors(data_dir / "vectors_dense.jsonl"),
        index=search_feed.load_index(data_dir / "index.json"),
        graph=graph,
        ranks=load_ranks(data_dir / "ranks.json"),
        layout=load_layout(data_dir / "layout.json"),
    )
