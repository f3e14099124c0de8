"""HTTP/JSON API over one build snapshot.

Every handler grabs the current snapshot reference exactly once, so a
rebuild can swap in a new snapshot mid-flight and each request still sees
one consistent artifact generation; the build version is embedded in every
response body to make that observable.  Feedback and impression counters
are the only mutable state, and both serialize through the corpus module.

Parameter validation is done by hand (instead of framework-level request
models) so malformed input consistently yields 400 {"error": ...}.
"""

from __future__ import annotations

import threading
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .corpus import FeedbackEvent, FeedbackKind
from .errors import NotFound
from .pipeline import Snapshot, load_snapshot
from .search_feed import feed, record_impressions, related, search

MAX_SUBGRAPH_NODES = 500


class _ApiResponse(JSONResponse):
    media_type = "application/json; charset=utf-8"


def _error(status: int, message: str) -> JSONResponse:
    return _ApiResponse({"error": message}, status_code=status)


def _coords(snapshot: Snapshot, doc_id: str) -> tuple[float | None, float | None]:
    xy = snapshot.layout.coords.get(doc_id)
    return (xy[0], xy[1]) if xy else (None, None)


def create_app(data_dir: str | Path, snapshot: Snapshot | None = None) -> FastAPI:
    """Build the API application for one data directory.

    The snapshot is loaded eagerly unless one is passed in (tests inject
    prebuilt snapshots).  `app.state.reload()` swaps in a fresh snapshot
    atomically; in-flight requests keep the one they started with.
    """
    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None,
                  default_response_class=_ApiResponse)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.data_dir = Path(data_dir)
    app.state.snapshot = snapshot if snapshot is not None else load_snapshot(data_dir)
    app.state.reload_lock = threading.Lock()

    def reload() -> Snapshot:
        with app.state.reload_lock:
            fresh = load_snapshot(app.state.data_dir)
            app.state.snapshot = fresh  # single reference assignment: atomic
            return fresh

    app.state.reload = reload

    @app.get("/api/search")
    def api_search(request: Request):
        snap: Snapshot = app.state.snapshot
        params = request.query_params
        query = params.get("q")
        if query is None or not query.strip():
            return _error(400, "missing required query parameter 'q'")
        limit = _parse_int(params.get("limit"), default=10)
        if limit is None or limit < 1:
            return _error(400, "limit must be a positive integer")
        ratings = _parse_bool(params.get("ratings"), default=True)
        if ratings is None:
            return _error(400, "ratings must be true or false")

        results = search(
            query,
            snap.lexicon,
            snap.index,
            snap.ranks.combined,
            limit=limit,
            use_network_ratings=ratings,
            rating_boost=snap.config.search.rating_boost,
        )
        record_impressions(snap.impressions, results, snap.config.graph.top_r)
        rows = []
        for r in results:
            doc = snap.store.get_document(r.doc_id)
            x, y = _coords(snap, r.doc_id)
            rows.append(
                {
                    "id": r.doc_id,
                    "title": doc.title,
                    "authors": list(doc.authors),
                    "venue": doc.venue,
                    "published": doc.published.isoformat(),
                    "text_score": r.text_score,
                    "network_rating": r.network_rating,
                    "final_score": r.final_score,
                    "position": r.position,
                    "x": x,
                    "y": y,
                }
            )
        return {"version": snap.version, "query": query, "results": rows}

    @app.get("/api/papers/{doc_id}")
    def api_paper(doc_id: str):
        snap: Snapshot = app.state.snapshot
        try:
            doc = snap.store.get_document(doc_id)
        except NotFound:
            return _error(404, f"no document with id {doc_id!r}")
        x, y = _coords(snap, doc_id)
        return {
            "version": snap.version,
            "id": doc.id,
            "title": doc.title,
            "authors": list(doc.authors),
            "venue": doc.venue,
            "published": doc.published.isoformat(),
            "abstract": doc.abstract,
            "body": doc.body,
            "pagerank": snap.ranks.pagerank.get(doc_id, 0.0),
            "reverse_pagerank": snap.ranks.reverse_pagerank.get(doc_id, 0.0),
            "combined": snap.ranks.combined.get(doc_id, 0.0),
            "x": x,
            "y": y,
        }

    @app.get("/api/papers/{doc_id}/related")
    def api_related(doc_id: str, request: Request):
        snap: Snapshot = app.state.snapshot
        limit = _parse_int(request.query_params.get("limit"), default=10)
        if limit is None or limit < 1:
            return _error(400, "limit must be a positive integer")
        if not snap.store.has_document(doc_id):
            return _error(404, f"no document with id {doc_id!r}")
        try:
            pairs = related(snap.graph, doc_id, limit=limit)
        except NotFound:
            # stored but not yet built into the graph
            pairs = []
        return {
            "version": snap.version,
            "id": doc_id,
            "related": [{"id": other, "weight": w} for other, w in pairs],
        }

    @app.get("/api/graph")
    def api_graph(request: Request):
        snap: Snapshot = app.state.snapshot
        params = request.query_params
        raw_ids = params.get("ids")
        if not raw_ids:
            return _error(400, "missing required query parameter 'ids'")
        ids = [part for part in raw_ids.split(",") if part]
        hops_raw = params.get("hops", "1")
        if hops_raw not in ("0", "1", "2"):
            return _error(400, "hops must be 0, 1, or 2")
        hops = int(hops_raw)
        for doc_id in ids:
            if not snap.graph.has_node(doc_id):
                return _error(404, f"no document with id {doc_id!r}")

        selected = set(ids)
        frontier = set(ids)
        for _ in range(hops):
            ring = set()
            for node in frontier:
                for neighbor, _w in snap.graph.neighbors(node):
                    if neighbor not in selected:
                        ring.add(neighbor)
            selected |= ring
            frontier = ring
        if len(selected) > MAX_SUBGRAPH_NODES:
            return _error(413, "subgraph too large")

        nodes = []
        for node in sorted(selected):
            x, y = _coords(snap, node)
            venue = snap.store.get_document(node).venue if snap.store.has_document(node) else ""
            nodes.append(
                {
                    "id": node,
                    "x": x,
                    "y": y,
                    "combined": snap.ranks.combined.get(node, 0.0),
                    "venue": venue,
                }
            )
        edges = [
            {"s": a, "t": b, "w": w}
            for a, b, w in snap.graph.edges()
            if a in selected and b in selected
        ]
        return {"version": snap.version, "nodes": nodes, "edges": edges}

    @app.post("/api/feedback")
    async def api_feedback(request: Request):
        snap: Snapshot = app.state.snapshot
        try:
            payload = await request.json()
        except Exception:
            return _error(400, "request body must be JSON")
        if not isinstance(payload, dict):
            return _error(400, "request body must be a JSON object")
        for name in ("user", "kind", "doc_id"):
            if not isinstance(payload.get(name), str) or not payload.get(name):
                return _error(400, f"missing or invalid field {name!r}")
        try:
            kind = FeedbackKind(payload["kind"])
        except ValueError:
            valid = ", ".join(k.value for k in FeedbackKind)
            return _error(400, f"unknown feedback kind {payload['kind']!r} (expected one of: {valid})")
        event = FeedbackEvent(
            user=payload["user"],
            kind=kind,
            doc_id=payload["doc_id"],
            timestamp=datetime.now(timezone.utc),
        )
        try:
            seq = snap.store.append_feedback(event)
        except NotFound:
            return _error(404, f"no document with id {payload['doc_id']!r}")
        if kind is FeedbackKind.CLICK:
            snap.impressions.record_click(event.doc_id)
        return _ApiResponse({"version": snap.version, "seq": seq}, status_code=202)

    @app.get("/api/feed")
    def api_feed(request: Request):
        snap: Snapshot = app.state.snapshot
        params = request.query_params
        user = params.get("user")
        if not user:
            return _error(400, "missing required query parameter 'user'")
        limit = _parse_int(params.get("limit"), default=10)
        if limit is None or limit < 1:
            return _error(400, "limit must be a positive integer")
        items = feed(user, snap.store.list_feedback(), snap.graph, snap.ranks.combined, limit=limit)
        rows = []
        for item in items:
            doc = snap.store.get_document(item.doc_id)
            x, y = _coords(snap, item.doc_id)
            rows.append(
                {
                    "id": item.doc_id,
                    "title": doc.title,
                    "venue": doc.venue,
                    "reason": item.reason.value,
                    "score": item.score,
                    "x": x,
                    "y": y,
                }
            )
        return {"version": snap.version, "user": user, "items": rows}

    return app


def _parse_int(raw: str | None, default: int) -> int | None:
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return None


def _parse_bool(raw: str | None, default: bool) -> bool | None:
    if raw is None:
        return default
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    return None


def serve(data_dir: str | Path, addr: str) -> None:
    """Run the API under uvicorn; `addr` is host:port."""
    import uvicorn

    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"addr must be host:port, got {addr!r}")
    app = create_app(data_dir)
    uvicorn.run(app, host=host, port=int(port), log_level="info")
