#!/usr/bin/env python3
"""
A map of the corpus
===================

The build lays every document out on a plane; nearby points share
vocabulary.  Two clearly separated topics should land as two
clusters, printed here as ASCII since the library ships no plotting.
"""

import json
import tempfile
from datetime import date
from pathlib import Path

from etymo.corpus import DocumentStore
from etymo.pipeline import build_all, load_config, load_snapshot

data_dir = Path(tempfile.mkdtemp(prefix="etymo-demo-"))
print(f"working in {data_dir}")

# two topics, five documents each, no shared vocabulary
ASTRONOMY = "telescope orbit nebula spectra stellar parallax transit"
POTTERY = "glaze kiln ceramic wheel slip bisque stoneware"

EXTRAS = ["alpha", "beta", "gamma", "delta", "epsilon"]

lines = []
for i in range(5):
    lines.append(json.dumps({
        "id": f"astro{i}", "title": f"Sky survey {i}", "abstract": "",
        "body": f"{ASTRONOMY} {EXTRAS[i]}", "authors": ["Demo Author"],
        "venue": "Astronomy", "published": str(date(2000 + i, 1, 1)),
    }))
    lines.append(json.dumps({
        "id": f"pot{i}", "title": f"Kiln notes {i}", "abstract": "",
        "body": f"{POTTERY} {EXTRAS[i]}", "authors": ["Demo Author"],
        "venue": "Pottery", "published": str(date(2000 + i, 1, 1)),
    }))
(data_dir / "corpus.jsonl").write_text("\n".join(lines) + "\n")

store = DocumentStore(data_dir)
store.ingest_documents(data_dir / "corpus.jsonl")

# small corpora want a gentle step size; the default suits thousands of docs
(data_dir / "etymo.toml").write_text("[layout]\nlearning_rate = 5.0\n")

build_all(data_dir, load_config(data_dir))
snap = load_snapshot(data_dir)

coords = {doc_id: pos for doc_id, pos in snap.layout.coords.items()}
xs = [p[0] for p in coords.values()]
ys = [p[1] for p in coords.values()]
span_x = max(xs) - min(xs) or 1.0
span_y = max(ys) - min(ys) or 1.0

WIDTH, HEIGHT = 60, 18
grid = [[" "] * WIDTH for _ in range(HEIGHT)]
for doc_id, (x, y) in coords.items():
    col = int((x - min(xs)) / span_x * (WIDTH - 1))
    row = int((y - min(ys)) / span_y * (HEIGHT - 1))
    grid[HEIGHT - 1 - row][col] = "A" if doc_id.startswith("astro") else "P"

print("\nA = astronomy, P = pottery\n")
for line in grid:
    print("  " + "".join(line))

astro = [coords[d] for d in coords if d.startswith("astro")]
pots = [coords[d] for d in coords if d.startswith("pot")]
centroid = lambda pts: (sum(p[0] for p in pts) / len(pts),
                        sum(p[1] for p in pts) / len(pts))
ax, ay = centroid(astro)
px, py = centroid(pots)
gap = ((ax - px) ** 2 + (ay - py) ** 2) ** 0.5
print(f"\ncluster centroid gap: {gap:.1f} layout units")
