"""Command-line pipeline driver: ingest, build, search, serve, insert.

Exit codes: 0 success, 1 runtime error, 2 usage error or missing/stale
prerequisite.  Mutating commands (ingest, build, insert) take a lock file
in the data directory so only one writer runs at a time; serving and
searching stay lock-free against the immutable artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from . import pipeline, search_feed, server
from .corpus import DocumentStore
from .errors import EtymoError, MissingPrerequisite, StaleArtifact
from .rank import load_ranks
from .vectorize import load_lexicon

LOCK_FILE = ".etymo.lock"
DEFAULT_ADDR = "127.0.0.1:8000"


@contextmanager
def _pipeline_lock(data_dir: Path):
    """Single-writer lock per data directory.  A lock left by a dead
    process is taken over; a live holder is an error."""
    data_dir.mkdir(parents=True, exist_ok=True)
    lock_path = data_dir / LOCK_FILE
    for _ in range(2):
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            break
        except FileExistsError:
            try:
                holder = int(lock_path.read_text().strip() or "0")
            except (OSError, ValueError):
                holder = 0
            if holder > 0 and _pid_alive(holder):
                raise EtymoError(
                    f"data directory is locked by running process {holder} ({lock_path})"
                )
            lock_path.unlink(missing_ok=True)
    else:
        raise EtymoError(f"could not acquire lock {lock_path}")
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock_path.unlink(missing_ok=True)


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except OSError:
        return False
    return True


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etymo",
        description="Document discovery engine: similarity network, ranking, layout, search.",
    )
    parser.add_argument(
        "--data",
        default=os.environ.get("ETYMO_DATA", "etymo_data"),
        help="data directory (default: $ETYMO_DATA or ./etymo_data)",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable JSON output")

    # the same flags are accepted after the subcommand; SUPPRESS keeps the
    # subparser from clobbering a value given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    common.add_argument(
        "--json", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="add documents from a JSONL file")
    p.add_argument("file", help="line-delimited JSON document records")

    p = sub.add_parser("build", parents=[common], help="run pipeline stages over the ingested corpus")
    p.add_argument(
        "--stage",
        choices=list(pipeline.STAGES) + ["all"],
        default="all",
        help="single stage to run (default: all, in dependency order)",
    )
    p.add_argument(
        "--force",
        action="store_true",
        help="run even if input artifacts are stale or untracked",
    )

    p = sub.add_parser("search", parents=[common], help="query the built index from the terminal")
    p.add_argument("query")
    p.add_argument("--limit", type=int, default=10)
    p.add_argument(
        "--no-network-rating",
        action="store_true",
        help="rank by lexical score alone, ignoring the network rating boost",
    )

    p = sub.add_parser("serve", parents=[common], help="serve the HTTP API on the current snapshot")
    p.add_argument(
        "--addr",
        default=os.environ.get("ETYMO_ADDR", DEFAULT_ADDR),
        help=f"host:port to listen on (default: $ETYMO_ADDR or {DEFAULT_ADDR})",
    )

    p = sub.add_parser("insert", parents=[common], help="insert documents incrementally, no full rebuild")
    p.add_argument("file", help="line-delimited JSON document records")

    return parser


def _cmd_ingest(args) -> int:
    data_dir = Path(args.data)
    with _pipeline_lock(data_dir):
        count = DocumentStore(data_dir).ingest_documents(args.file)
    if args.json:
        print(json.dumps({"ingested": count}))
    else:
        print(f"ingested {count} new document(s)")
    return 0


def _cmd_build(args) -> int:
    data_dir = Path(args.data)
    config = pipeline.load_config(data_dir)
    with _pipeline_lock(data_dir):
        if args.stage == "all":
            manifest = pipeline.build_all(data_dir, config, force=args.force)
            stages_run = list(pipeline.STAGES)
        else:
            manifest = pipeline.run_stage(data_dir, args.stage, config, force=args.force)
            stages_run = [args.stage]
    if args.json:
        print(json.dumps({"version": manifest.get("version", 0), "stages": stages_run}))
    else:
        for stage in stages_run:
            outputs = ", ".join(pipeline.STAGE_OUTPUTS[stage])
            print(f"stage {stage}: ok ({outputs})")
        print(f"build version {manifest.get('version', 0)}")
    return 0


def _format_authors(authors: tuple[str, ...]) -> str:
    if not authors:
        return "-"
    if len(authors) > 3:
        return ", ".join(authors[:3]) + " et al."
    return ", ".join(authors)


def _cmd_search(args) -> int:
    data_dir = Path(args.data)
    for name, stage in (("lexicon.json", "lexicon"), ("index.json", "vectors")):
        if not (data_dir / name).exists():
            raise MissingPrerequisite(stage, f"artifact {name} is missing; run a build first")
    lexicon = load_lexicon(data_dir / "lexicon.json")
    index = search_feed.load_index(data_dir / "index.json")
    use_ratings = not args.no_network_rating
    if use_ratings:
        if not (data_dir / "ranks.json").exists():
            raise MissingPrerequisite("rank", "artifact ranks.json is missing; run a build first")
        combined = load_ranks(data_dir / "ranks.json").combined
    else:
        combined = {}
    config = pipeline.load_config(data_dir)
    results = search_feed.search(
        args.query,
        lexicon,
        index,
        combined,
        limit=args.limit,
        use_network_ratings=use_ratings,
        rating_boost=config.search.rating_boost,
    )
    store = DocumentStore(data_dir)

    if args.json:
        rows = []
        for r in results:
            doc = store.get_document(r.doc_id)
            rows.append(
                {
                    "id": r.doc_id,
                    "position": r.position,
                    "text_score": r.text_score,
                    "network_rating": r.network_rating,
                    "final_score": r.final_score,
                    "title": doc.title,
                    "authors": list(doc.authors),
                    "venue": doc.venue,
                    "published": doc.published.isoformat(),
                }
            )
        print(json.dumps(rows))
        return 0

    if not results:
        print("no results")
        return 0
    for r in results:
        doc = store.get_document(r.doc_id)
        print(
            f"{r.position:3d}  {r.final_score:7.4f}  "
            f"{_format_authors(doc.authors)}  {doc.published.year}  {doc.title}"
        )
    return 0


def _cmd_serve(args) -> int:
    server.serve(args.data, args.addr)
    return 0


def _cmd_insert(args) -> int:
    data_dir = Path(args.data)
    config = pipeline.load_config(data_dir)
    with _pipeline_lock(data_dir):
        result = pipeline.insert_documents(data_dir, args.file, config)
    if args.json:
        print(json.dumps(result))
    else:
        if not result["inserted"]:
            print("no new documents")
        for row in result["inserted"]:
            print(f"inserted {row['id']} with {row['edges']} edge(s)")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "build": _cmd_build,
    "search": _cmd_search,
    "serve": _cmd_serve,
    "insert": _cmd_insert,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (MissingPrerequisite, StaleArtifact) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EtymoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
