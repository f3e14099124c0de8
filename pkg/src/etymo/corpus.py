"""Persistent document store, corpus ingestion, and the append-only feedback log.

Everything lives in one data directory as line-delimited JSON:

    documents.jsonl    one document per line, fields
                       id, title, authors, venue, published, abstract, body
    feedback.jsonl     append-only event log, fields
                       user, kind ("star"|"click"|"library_add"), doc_id, timestamp
    impressions.jsonl  per-document impression/click counters, fields
                       doc_id, impressions, clicks

Writes are serialized through a single in-process writer lock; readers always
see whole records (a partially flushed trailing line is ignored).
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DuplicateId, NotFound, SchemaError

DOCUMENTS_FILE = "documents.jsonl"
FEEDBACK_FILE = "feedback.jsonl"
IMPRESSIONS_FILE = "impressions.jsonl"

# Full calendar date required: orientation needs a total order over days,
# so year-month records are rejected rather than defaulted.
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


class FeedbackKind(Enum):
    STAR = "star"
    CLICK = "click"
    LIBRARY_ADD = "library_add"


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    authors: tuple[str, ...]
    venue: str
    published: date
    abstract: str
    body: str

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "authors": list(self.authors),
            "venue": self.venue,
            "published": self.published.isoformat(),
            "abstract": self.abstract,
            "body": self.body,
        }


@dataclass(frozen=True)
class FeedbackEvent:
    user: str
    kind: FeedbackKind
    doc_id: str
    timestamp: datetime
    seq: int | None = None  # assigned by the store, not serialized

    def to_record(self) -> dict:
        return {
            "user": self.user,
            "kind": self.kind.value,
            "doc_id": self.doc_id,
            "timestamp": self.timestamp.isoformat(),
        }


@dataclass
class ImpressionRecord:
    doc_id: str
    impressions: int = 0
    clicks: int = 0


def parse_published(value, line: int) -> date:
    if not isinstance(value, str) or not _DATE_RE.match(value):
        raise SchemaError(line, f"published must be a full ISO calendar date, got {value!r}")
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise SchemaError(line, f"published is not a valid calendar date: {value!r}") from None


def parse_document(record: dict, line: int) -> Document:
    """Validate one raw JSON record and build a Document, or raise SchemaError."""
    for name in ("id", "title", "authors", "venue", "published", "abstract", "body"):
        if name not in record:
            raise SchemaError(line, f"missing required field {name!r}")
    doc_id = record["id"]
    if not isinstance(doc_id, str) or not doc_id:
        raise SchemaError(line, "id must be a nonempty string")
    authors = record["authors"]
    if not isinstance(authors, list) or not all(isinstance(a, str) for a in authors):
        raise SchemaError(line, "authors must be a list of strings")
    for name in ("title", "venue", "abstract", "body"):
        if not isinstance(record[name], str):
            raise SchemaError(line, f"{name} must be a string")
    if not record["body"]:
        raise SchemaError(line, "body must be nonempty")
    return Document(
        id=doc_id,
        title=record["title"],
        authors=tuple(authors),
        venue=record["venue"],
        published=parse_published(record["published"], line),
        abstract=record["abstract"],
        body=record["body"],
    )


def _parse_timestamp(value, line: int) -> datetime:
    if not isinstance(value, str):
        raise SchemaError(line, "timestamp must be an ISO-8601 string")
    try:
        return datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise SchemaError(line, f"bad timestamp {value!r}") from None


def parse_feedback(record: dict, line: int, seq: int | None = None) -> FeedbackEvent:
    for name in ("user", "kind", "doc_id", "timestamp"):
        if name not in record:
            raise SchemaError(line, f"missing required field {name!r}")
    try:
        kind = FeedbackKind(record["kind"])
    except ValueError:
        raise SchemaError(line, f"unknown feedback kind {record['kind']!r}") from None
    return FeedbackEvent(
        user=record["user"],
        kind=kind,
        doc_id=record["doc_id"],
        timestamp=_parse_timestamp(record["timestamp"], line),
        seq=seq,
    )


def _complete_lines(path: Path) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, stripped line), skipping an unterminated tail."""
    if not path.exists():
        return
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.endswith("\n"):
                break  # writer still mid-record
            stripped = raw.strip()
            if stripped:
                yield lineno, stripped


class DocumentStore:
    """Single-writer, multi-reader store over one data directory."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()
        self._documents: dict[str, Document] = {}
        self._feedback_count = 0
        self._load()

    @property
    def documents_path(self) -> Path:
        return self.data_dir / DOCUMENTS_FILE

    @property
    def feedback_path(self) -> Path:
        return self.data_dir / FEEDBACK_FILE

    def _load(self) -> None:
        for lineno, line in _complete_lines(self.documents_path):
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                raise SchemaError(lineno, "invalid JSON in document store") from None
            doc = parse_document(record, lineno)
            self._documents[doc.id] = doc
        self._feedback_count = sum(1 for _ in _complete_lines(self.feedback_path))

    # -- documents ---------------------------------------------------------

    def ingest_documents(self, path: str | Path) -> int:
        """Ingest a file of line-delimited JSON documents.

        The whole file is validated before anything is persisted, so a bad
        record leaves the store untouched.  Records identical to ones already
        stored are skipped; the same id with differing content is an error.
        Returns the number of newly persisted documents.
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"no such file: {path}")
        fresh: list[Document] = []
        seen_in_file: dict[str, Document] = {}
        with self._write_lock:
            for lineno, line in _complete_lines(path):
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    raise SchemaError(lineno, "invalid JSON") from None
                doc = parse_document(record, lineno)
                existing = self._documents.get(doc.id) or seen_in_file.get(doc.id)
                if existing is not None:
                    if existing != doc:
                        raise DuplicateId(
                            f"id {doc.id!r} re-ingested with differing content (line {lineno})"
                        )
                    continue  # identical record: idempotent no-op
                seen_in_file[doc.id] = doc
                fresh.append(doc)
            if fresh:
                with self.documents_path.open("a", encoding="utf-8") as fh:
                    for doc in fresh:
                        fh.write(json.dumps(doc.to_record(), ensure_ascii=False) + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
                for doc in fresh:
                    self._documents[doc.id] = doc
        return len(fresh)

    def get_document(self, doc_id: str) -> Document:
        try:
            return self._documents[doc_id]
        except KeyError:
            raise NotFound(f"no document with id {doc_id!r}") from None

    def has_document(self, doc_id: str) -> bool:
        return doc_id in self._documents

    def all_documents(self) -> list[Document]:
        """All documents, sorted by id for deterministic iteration."""
        return [self._documents[i] for i in sorted(self._documents)]

    def __len__(self) -> int:
        return len(self._documents)

    # -- feedback ----------------------------------------------------------

    def append_feedback(self, event: FeedbackEvent) -> int:
        """Durably append one event; returns its sequence number (1-based)."""
        if event.doc_id not in self._documents:
            raise NotFound(f"feedback references unknown document {event.doc_id!r}")
        with self._write_lock:
            with self.feedback_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event.to_record(), ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._feedback_count += 1
            return self._feedback_count

    def list_feedback(self, since: int = 0) -> list[FeedbackEvent]:
        """All events with sequence number > since, in log order."""
        if since < 0:
            raise ValueError("since must be >= 0")
        events = []
        for seq, (lineno, line) in enumerate(_complete_lines(self.feedback_path), start=1):
            if seq <= since:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                raise SchemaError(lineno, "invalid JSON in feedback log") from None
            events.append(parse_feedback(record, lineno, seq=seq))
        return events


class ImpressionStore:
    """Impression/click counters behind the click-rate demotion rule.

    record_impressions is driven by search serving; clicks arrive with click
    feedback.  Clicks are clamped so clicks <= impressions always holds (a
    click reaching a document some other way than a result list would
    otherwise break the rate).
    """

    def __init__(self, data_dir: str | Path):
        self.path = Path(data_dir) / IMPRESSIONS_FILE
        self._lock = threading.Lock()
        self._records: dict[str, ImpressionRecord] = {}
        self._load()

    def _load(self) -> None:
        for lineno, line in _complete_lines(self.path):
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                raise SchemaError(lineno, "invalid JSON in impressions file") from None
            rec = ImpressionRecord(
                doc_id=record["doc_id"],
                impressions=int(record["impressions"]),
                clicks=int(record["clicks"]),
            )
            self._records[rec.doc_id] = rec

    def _save_locked(self) -> None:
        tmp = self.path.with_suffix(".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for doc_id in sorted(self._records):
                rec = self._records[doc_id]
                fh.write(
                    json.dumps(
                        {"doc_id": rec.doc_id, "impressions": rec.impressions, "clicks": rec.clicks}
                    )
                    + "\n"
                )
        os.replace(tmp, self.path)

    def record_impressions(self, doc_ids: Iterable[str]) -> None:
        with self._lock:
            for doc_id in doc_ids:
                rec = self._records.setdefault(doc_id, ImpressionRecord(doc_id))
                rec.impressions += 1
            self._save_locked()

    def record_click(self, doc_id: str) -> None:
        with self._lock:
            rec = self._records.setdefault(doc_id, ImpressionRecord(doc_id))
            if rec.clicks < rec.impressions:
                rec.clicks += 1
            self._save_locked()

    def get(self, doc_id: str) -> ImpressionRecord:
        with self._lock:
            rec = self._records.get(doc_id)
            return ImpressionRecord(doc_id, rec.impressions, rec.clicks) if rec else ImpressionRecord(doc_id)

    def all_records(self) -> list[ImpressionRecord]:
        with self._lock:
            return [
                ImpressionRecord(r.doc_id, r.impressions, r.clicks)
                for _, r in sorted(self._records.items())
            ]
