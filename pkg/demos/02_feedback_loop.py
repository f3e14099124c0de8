#!/usr/bin/env python3
"""
Feedback reshaping the network
==============================

Stars multiply the weights on a document's edges, shared library
membership creates brand new edges, and the rebuilt ranking moves.
"""

import json
import tempfile
from datetime import date, datetime, timezone
from pathlib import Path

from etymo.corpus import DocumentStore, FeedbackEvent, FeedbackKind
from etymo.pipeline import build_all, load_config, load_snapshot
from etymo.search_feed import feed

data_dir = Path(tempfile.mkdtemp(prefix="etymo-demo-"))
print(f"working in {data_dir}")

# three overlapping documents plus one outsider
DOCS = [
    ("core", "Shared vocabulary study", "tokens shared across papers form edges"),
    ("twin", "Vocabulary overlap revisited", "tokens shared across papers form links"),
    ("kin", "Edges from common tokens", "papers form edges from shared tokens"),
    ("outsider", "Unrelated pottery notes", "glaze kiln ceramic firing schedule"),
]

corpus_file = data_dir / "corpus.jsonl"
corpus_file.write_text("\n".join(
    json.dumps({
        "id": doc_id, "title": title, "abstract": "", "body": body,
        "authors": ["Demo Author"], "venue": "Demo Venue",
        "published": str(date(2010 + i, 3, 1)),
    })
    for i, (doc_id, title, body) in enumerate(DOCS)
) + "\n")

store = DocumentStore(data_dir)
store.ingest_documents(corpus_file)
# delta_lib above the prune floor so a brand-new library edge survives
(data_dir / "etymo.toml").write_text("[graph]\nalpha = 0.2\ndelta_lib = 0.1\n")

build_all(data_dir, load_config(data_dir))
snap = load_snapshot(data_dir)

print("\nedges before feedback:")
for a, b, w in sorted(snap.graph.undirected_projection().edges()):
    print(f"  {a} -- {b}  {w:.4f}")

# one user stars the core paper, another shelves core and the outsider
now = datetime.now(timezone.utc)
for user, kind, doc_id in [
    ("alice", FeedbackKind.STAR, "core"),
    ("bob", FeedbackKind.LIBRARY_ADD, "core"),
    ("bob", FeedbackKind.LIBRARY_ADD, "outsider"),
]:
    store.append_feedback(FeedbackEvent(user=user, kind=kind,
                                        doc_id=doc_id, timestamp=now))

build_all(data_dir, load_config(data_dir))
snap = load_snapshot(data_dir)

print("\nedges after one star and one shared library:")
for a, b, w in sorted(snap.graph.undirected_projection().edges()):
    print(f"  {a} -- {b}  {w:.4f}")
print("  (core's edges grew 5%; core--outsider did not exist before)")

print("\nalice's feed now leans on what she starred:")
for item in feed("alice", snap.store.list_feedback(), snap.graph.undirected_projection(),
                 snap.ranks.combined, limit=3):
    print(f"  {item.doc_id:<10} {item.reason.value:<18} score={item.score:.4f}")
