"""Tokenization, lexicon construction, TF-IDF vectors, dense embeddings, cosine.

Documents are represented two ways: a sparse TF-IDF vector over the global
lexicon, and a dense n-dimensional embedding.  The baseline embedding is a
seeded sign random projection of the TF-IDF vector, which approximately
preserves cosine similarities while staying fully deterministic; externally
trained vectors can be dropped in from an embeddings.jsonl file instead.

TF-IDF variant: sublinear term frequency (1 + ln tf) times smoothed inverse
document frequency ln((1 + N) / (1 + df)) + 1, then L2 normalization.  The
idf is strictly positive, so every in-lexicon term contributes.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .corpus import Document
from .errors import EmptyCorpus, EmptyVector, ZeroNorm

# Letters and digits with internal hyphens kept, so "t-sne" is one token.
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)

# 30 common English function words.
STOPWORDS = frozenset(
    """
    an and are as at be by for from has have in is it its of on or that the
    this to was we were which with using their also
    """.split()
)


def tokenize(text: str, stopwords: frozenset[str] = STOPWORDS) -> list[str]:
    """Lowercase, split on non-alphanumerics (internal hyphens survive),
    drop tokens shorter than 2 characters and stopwords."""
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) >= 2 and tok not in stopwords
    ]


def document_tokens(doc: Document, stopwords: frozenset[str] = STOPWORDS) -> list[str]:
    """Tokens of the concatenated title, abstract, and body."""
    return tokenize(" ".join((doc.title, doc.abstract, doc.body)), stopwords)


@dataclass(frozen=True)
class TermEntry:
    term_id: int
    df: int
    idf: float


@dataclass
class TermLexicon:
    """Global term table: dense term ids, document frequencies, idf weights."""

    terms: dict[str, TermEntry]
    corpus_size: int

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.terms

    def term_by_id(self) -> dict[int, str]:
        return {entry.term_id: term for term, entry in self.terms.items()}


def idf_weight(df: int, corpus_size: int) -> float:
    return math.log((1 + corpus_size) / (1 + df)) + 1.0


def build_lexicon(
    documents: Iterable[Document], stopwords: frozenset[str] = STOPWORDS
) -> TermLexicon:
    """Count document frequencies over the corpus and assign term ids in
    lexicographic order, so the lexicon is independent of document order."""
    df: dict[str, int] = {}
    corpus_size = 0
    for doc in documents:
        corpus_size += 1
        for term in set(document_tokens(doc, stopwords)):
            df[term] = df.get(term, 0) + 1
    if corpus_size == 0:
        raise EmptyCorpus("cannot build a lexicon over zero documents")
    terms = {
        term: TermEntry(term_id=i, df=df[term], idf=idf_weight(df[term], corpus_size))
        for i, term in enumerate(sorted(df))
    }
    return TermLexicon(terms=terms, corpus_size=corpus_size)


@dataclass
class SparseVector:
    """L2-normalized sparse vector keyed by term id."""

    entries: dict[int, float]
    norm: float


def weights_from_counts(counts: Mapping[str, int], lexicon: TermLexicon) -> SparseVector:
    """Sublinear-tf/idf weights for a token-count bag, L2-normalized.
    Terms outside the lexicon are skipped."""
    entries: dict[int, float] = {}
    for term, tf in counts.items():
        entry = lexicon.terms.get(term)
        if entry is None or tf < 1:
            continue
        entries[entry.term_id] = (1.0 + math.log(tf)) * entry.idf
    if not entries:
        raise EmptyVector("no in-lexicon tokens")
    norm = math.sqrt(sum(w * w for w in entries.values()))
    entries = {tid: w / norm for tid, w in entries.items()}
    return SparseVector(entries=entries, norm=1.0)


def tfidf_vector(doc: Document, lexicon: TermLexicon,
                 stopwords: frozenset[str] = STOPWORDS) -> SparseVector:
    """TF-IDF vector of a document over title + abstract + body tokens."""
    counts: dict[str, int] = {}
    for tok in document_tokens(doc, stopwords):
        counts[tok] = counts.get(tok, 0) + 1
    try:
        return weights_from_counts(counts, lexicon)
    except EmptyVector:
        raise EmptyVector(f"document {doc.id!r} has no in-lexicon tokens") from None


def _projection_column(seed: int, term_id: int, n: int) -> np.ndarray:
    """Signed projection column for one term, drawn from a stream seeded by
    (seed, term_id) so the matrix never has to be materialized."""
    rng = np.random.default_rng([seed, term_id])
    return (rng.integers(0, 2, size=n) * 2 - 1) / math.sqrt(n)


def embed_tfidf(vec: SparseVector, n: int, seed: int) -> np.ndarray:
    """Sign random projection of a sparse vector into n dimensions, normalized."""
    acc = np.zeros(n)
    for term_id, weight in sorted(vec.entries.items()):
        acc += weight * _projection_column(seed, term_id, n)
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        # All projected mass cancelled; keep the direction deterministic.
        acc[0] = 1.0
        return acc
    return acc / norm


def embed(doc: Document, lexicon: TermLexicon, n: int = 256, seed: int = 42) -> np.ndarray:
    """Dense embedding of a document: random projection of its TF-IDF vector.

    Pure in (document tokens, lexicon, n, seed); calling twice gives
    identical vectors.
    """
    return embed_tfidf(tfidf_vector(doc, lexicon), n=n, seed=seed)


def cosine_similarity(u, v) -> float:
    """Inner product over the product of Euclidean norms.

    Accepts two SparseVectors or two dense array-likes.  Raises ZeroNorm if
    either input has zero norm.
    """
    if isinstance(u, SparseVector) and isinstance(v, SparseVector):
        nu = math.sqrt(sum(w * w for w in u.entries.values()))
        nv = math.sqrt(sum(w * w for w in v.entries.values()))
        if nu == 0.0 or nv == 0.0:
            raise ZeroNorm("cosine similarity of a zero vector is undefined")
        small, large = (u.entries, v.entries) if len(u.entries) <= len(v.entries) else (v.entries, u.entries)
        dot = sum(w * large[tid] for tid, w in small.items() if tid in large)
        return dot / (nu * nv)
    ua = np.asarray(u, dtype=float)
    va = np.asarray(v, dtype=float)
    nu = float(np.linalg.norm(ua))
    nv = float(np.linalg.norm(va))
    if nu == 0.0 or nv == 0.0:
        raise ZeroNorm("cosine similarity of a zero vector is undefined")
    return float(np.dot(ua, va) / (nu * nv))


# -- artifact files --------------------------------------------------------

def save_lexicon(lexicon: TermLexicon, path: str | Path) -> None:
    payload = {
        "corpus_size": lexicon.corpus_size,
        "terms": [
            {"term": term, "term_id": e.term_id, "df": e.df, "idf": e.idf}
            for term, e in sorted(lexicon.terms.items())
        ],
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def load_lexicon(path: str | Path) -> TermLexicon:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    terms = {
        t["term"]: TermEntry(term_id=t["term_id"], df=t["df"], idf=t["idf"])
        for t in payload["terms"]
    }
    return TermLexicon(terms=terms, corpus_size=payload["corpus_size"])


def save_tfidf_vectors(vectors: Mapping[str, SparseVector], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc_id in sorted(vectors):
            entries = {str(tid): w for tid, w in sorted(vectors[doc_id].entries.items())}
            fh.write(json.dumps({"id": doc_id, "entries": entries}) + "\n")


def load_tfidf_vectors(path: str | Path) -> dict[str, SparseVector]:
    vectors: dict[str, SparseVector] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            entries = {int(tid): w for tid, w in record["entries"].items()}
            vectors[record["id"]] = SparseVector(entries=entries, norm=1.0)
    return vectors


def save_dense_vectors(vectors: Mapping[str, np.ndarray], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc_id in sorted(vectors):
            fh.write(json.dumps({"id": doc_id, "components": list(map(float, vectors[doc_id]))}) + "\n")


def load_dense_vectors(path: str | Path) -> dict[str, np.ndarray]:
    vectors: dict[str, np.ndarray] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            vectors[record["id"]] = np.asarray(record["components"], dtype=float)
    return vectors


def load_external_embeddings(path: str | Path, n: int) -> dict[str, np.ndarray]:
    """Externally supplied embeddings (id -> array of n reals); overrides the
    random-projection baseline when present."""
    vectors: dict[str, np.ndarray] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            vec = np.asarray(record["vector"], dtype=float)
            if vec.shape != (n,):
                raise ValueError(
                    f"embeddings line {lineno}: expected {n} components, got {vec.shape}"
                )
            vectors[record["id"]] = vec
    return vectors
