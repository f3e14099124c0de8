"""Shared fixtures.

The docs12 corpus (tests/fixtures/docs12.jsonl plus etymo.toml) is frozen:
S is a 1995 hub that ten later documents link to (highest combined rating),
T is an isolated document with the best lexical match for the query
"etymology", and alpha/mu were chosen so the similarity gaps are wide.
Bodies carry the entire token stream; titles and abstracts are empty on
purpose so the vectors depend only on the body column.
"""

from __future__ import annotations

import shutil
from datetime import date
from pathlib import Path

import pytest

from etymo.corpus import Document, DocumentStore
from etymo.pipeline import build_all, load_config
from etymo.simnet import SimilarityGraph

FIXTURES = Path(__file__).parent / "fixtures"


def make_doc(
    doc_id: str,
    body: str,
    published: date = date(2020, 1, 1),
    title: str = "",
    abstract: str = "",
    venue: str = "TestVenue",
    authors: tuple[str, ...] = ("A. Tester",),
) -> Document:
    return Document(
        id=doc_id,
        title=title,
        authors=authors,
        venue=venue,
        published=published,
        abstract=abstract,
        body=body,
    )


@pytest.fixture
def toy3():
    """The cat/dog/fish corpus used by the hand-checked TF-IDF examples."""
    return [
        make_doc("A", "cat cat dog", date(2019, 1, 1)),
        make_doc("B", "dog fish", date(2020, 6, 1)),
        make_doc("C", "fish fish fish", date(2021, 3, 1)),
    ]


@pytest.fixture
def six_node_graph():
    """Hand-built undirected graph: n1 is a hub with three neighbors of
    distinct weights, n2 chains on to n5, n6 is isolated."""
    g = SimilarityGraph(directed=False)
    for node in ("n1", "n2", "n3", "n4", "n5", "n6"):
        g.add_node(node)
    g.set_edge("n1", "n2", 0.9)
    g.set_edge("n1", "n3", 0.7)
    g.set_edge("n1", "n4", 0.55)
    g.set_edge("n2", "n5", 0.8)
    return g


@pytest.fixture
def combined6():
    return {"n1": 1.0, "n2": 0.8, "n3": 0.6, "n4": 0.9, "n5": 0.3, "n6": 0.5}


def _build_fixture_dir(target: Path) -> Path:
    target.mkdir(parents=True, exist_ok=True)
    shutil.copy(FIXTURES / "etymo.toml", target / "etymo.toml")
    store = DocumentStore(target)
    store.ingest_documents(FIXTURES / "docs12.jsonl")
    build_all(target, load_config(target))
    return target


@pytest.fixture(scope="session")
def built12_readonly(tmp_path_factory):
    """The docs12 corpus, fully built once per session.  Read-only: tests
    that write (feedback, impressions, rebuilds) must use built12."""
    return _build_fixture_dir(tmp_path_factory.mktemp("docs12") / "data")


@pytest.fixture
def built12(built12_readonly, tmp_path):
    """A private copy of the built docs12 directory, safe to mutate."""
    target = tmp_path / "data"
    shutil.copytree(built12_readonly, target)
    return target


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one line per acceptance criterion after the run, outside capture."""
    try:
        import test_acceptance
    except ImportError:
        return
    results = getattr(test_acceptance, "RESULTS", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for status, name in results:
        terminalreporter.write_line(f"ACCEPTANCE {status}: {name}")
