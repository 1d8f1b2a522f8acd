"""Command line front end.

Exit codes: 0 on success, 2 when inputs cannot be read or parsed, 3 when
the data was fine but the request was not (bad query syntax, unknown
place or node, no route).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import EngineConfig, load_config
from .errors import (
    EmptyQuery,
    GeosearchError,
    NoPath,
    QuerySyntaxError,
    UnknownDoc,
    UnknownId,
    UnknownNode,
    UnknownPlace,
)
from .rdf import serialize_ntriples
from .service import place_ntriples, route_record, search_response
from .snapshot import build_snapshot, load_snapshot

_REQUEST_ERRORS = (
    QuerySyntaxError,
    EmptyQuery,
    UnknownPlace,
    UnknownNode,
    UnknownId,
    UnknownDoc,
    NoPath,
)


def _resolve_config(args: argparse.Namespace, base: EngineConfig) -> EngineConfig:
    config = base
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as f:
            config = load_config(f)
    overrides = {}
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    if getattr(args, "top_k", None) is not None:
        overrides["top_k"] = args.top_k
    return replace(config, **overrides) if overrides else config


def _write_out(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _cmd_build_index(args: argparse.Namespace) -> int:
    config = _resolve_config(args, EngineConfig())
    report = build_snapshot(
        args.out,
        gazetteer_path=args.gazetteer,
        corpus_path=args.corpus,
        lexicon_path=args.lexicon,
        network_path=args.network,
        config=config,
    )
    print(f"snapshot written to {args.out}")
    for line in report.lines():
        print(f"  {line}")
    return 0


def _cmd_search(args: argparse.Namespace) -> int:
    engine = load_snapshot(args.snapshot)
    config = _resolve_config(args, engine.config)
    response = search_response(engine, args.query, config)
    if args.json:
        print(json.dumps(response, indent=2))
        return 0
    results = response["results"]
    if not results:
        print("no results")
        return 0
    for rank, record in enumerate(results, 1):
        print(f"{rank:2d}. {record['score']:.4f}  {record['doc_id']}  {record['title']}")
    return 0


def _cmd_route(args: argparse.Namespace) -> int:
    engine = load_snapshot(args.snapshot)
    record = route_record(engine, args.src, args.dst)
    if args.json:
        print(json.dumps(record, indent=2))
    else:
        hops = " -> ".join(str(node) for node in record["nodes"])
        print(f"{hops}  ({record['cost_km']:g} km)")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import make_server

    engine = load_snapshot(args.snapshot)
    server = make_server(engine, args.host, args.port)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _cmd_export_rdf(args: argparse.Namespace) -> int:
    engine = load_snapshot(args.snapshot)
    if args.annotations:
        data = serialize_ntriples(engine.annotation_triples).encode("utf-8")
    elif args.place is not None:
        data = place_ntriples(engine, args.place)
    else:
        triples = []
        for place_id in sorted(engine.gazetteer.entries):
            triples.extend(engine.gazetteer.export_rdf(place_id))
        data = serialize_ntriples(triples).encode("utf-8")
    _write_out(data, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geosearch",
        description="Geographic search over an annotated document corpus.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("build-index", help="parse inputs and write a snapshot directory")
    p.add_argument("--gazetteer", required=True, help="gazetteer TSV file")
    p.add_argument("--corpus", required=True, help="corpus JSONL file")
    p.add_argument("--lexicon", help="concept lexicon JSON file")
    p.add_argument("--network", help="path network TSV file")
    p.add_argument("--config", help="engine config JSON file")
    p.add_argument("--out", required=True, help="snapshot directory to write")
    p.set_defaults(func=_cmd_build_index)

    p = sub.add_parser("search", help="run a query against a snapshot")
    p.add_argument("query", help='e.g. \'lodging hotels IN Hyderabad\'')
    p.add_argument("--snapshot", required=True, help="snapshot directory")
    p.add_argument("--config", help="engine config JSON file (overrides the snapshot's)")
    p.add_argument("--alpha", type=float, help="text weight in [0, 1]")
    p.add_argument("--top-k", type=int, help="number of results")
    p.add_argument("--json", action="store_true", help="print the JSON response")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("route", help="cheapest path between two gazetteer nodes")
    p.add_argument("--snapshot", required=True, help="snapshot directory")
    p.add_argument("--from", dest="src", type=int, required=True, help="start node id")
    p.add_argument("--to", dest="dst", type=int, required=True, help="end node id")
    p.add_argument("--json", action="store_true", help="print the JSON response")
    p.set_defaults(func=_cmd_route)

    p = sub.add_parser("serve", help="serve a snapshot over HTTP")
    p.add_argument("--snapshot", required=True, help="snapshot directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export-rdf", help="write N-Triples for gazetteer entries")
    p.add_argument("--snapshot", required=True, help="snapshot directory")
    p.add_argument("--place", type=int, help="export a single entry")
    p.add_argument(
        "--annotations", action="store_true", help="export document annotations instead"
    )
    p.add_argument("-o", "--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_export_rdf)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except _REQUEST_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (GeosearchError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
