"""JSON response shaping and a small threaded HTTP front end.

The CLI and the HTTP server build their payloads through the same
functions here, so `geosearch search --json` and GET /search return the
same structure for the same query.
"""

from __future__ import annotations

import json
import re
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .config import EngineConfig
from .errors import (
    EmptyQuery,
    GeosearchError,
    NoPath,
    ParseError,
    QuerySyntaxError,
    UnknownDoc,
    UnknownId,
    UnknownNode,
    UnknownPlace,
)
from .gazetteer import entity_iri
from .geo import PathNetwork, shortest_path
from .query import parse_query, run, unparse
from .rdf import serialize_ntriples
from .snapshot import Engine

NTRIPLES_TYPE = "application/n-triples"
JSON_TYPE = "application/json"

_NOT_FOUND = (UnknownId, UnknownPlace, UnknownNode, UnknownDoc, NoPath)


def search_response(engine: Engine, q: str, config: EngineConfig | None = None) -> dict:
    """Execute a query string and shape the ranked results for JSON output."""
    ast = parse_query(q)
    outcome = run(ast, engine, config)
    results = []
    for r in outcome.results:
        doc = engine.documents[r.doc_id]
        results.append(
            {
                "doc_id": r.doc_id,
                "title": doc.title,
                "uri": doc.uri,
                "score": r.combined,
                "text_score": r.text_score,
                "spatial_score": r.spatial_score,
                "places": list(r.places),
            }
        )
    return {
        "query": unparse(ast),
        "total_candidates": outcome.total_candidates,
        "results": results,
    }


def place_record(engine: Engine, place_id: int) -> dict:
    """JSON shape of one gazetteer entry; raises UnknownId."""
    entry = engine.gazetteer.get(place_id)
    record = {
        "id": entry.id,
        "iri": entity_iri(entry.id),
        "name": entry.name,
        "alt_names": list(entry.alt_names),
        "lat": entry.location.lat,
        "lon": entry.location.lon,
        "feature_class": entry.feature_class,
        "feature_code": entry.feature_code,
        "parent_id": entry.parent_id,
        "population": entry.population,
        "children": list(engine.gazetteer.children(entry.id)),
    }
    if entry.elevation_m is not None:
        record["elevation_m"] = entry.elevation_m
    return record


def place_ntriples(engine: Engine, place_id: int) -> bytes:
    """The entry's RDF description, byte-identical to the export writer."""
    return serialize_ntriples(engine.gazetteer.export_rdf(place_id)).encode("utf-8")


def route_record(engine: Engine, src: int, dst: int) -> dict:
    """Cheapest route between two gazetteer nodes over the path network."""
    # with no network loaded every node is unknown, which is the honest answer
    network = engine.network if engine.network is not None else PathNetwork({}, [])
    nodes, cost = shortest_path(network, src, dst)
    return {"from": src, "to": dst, "nodes": list(nodes), "cost_km": cost}


def _error_code(exc: BaseException) -> str:
    name = type(exc).__name__
    return re.sub(r"(?<=[a-z0-9])(?=[A-Z])", "_", name).lower()


class _Handler(BaseHTTPRequestHandler):
    engine: Engine  # bound by make_server

    server_version = "geosearch"
    sys_version = ""
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload: dict) -> None:
        self._send(status, (json.dumps(payload) + "\n").encode("utf-8"), JSON_TYPE)

    def _fail(self, status: int, code: str, detail: str) -> None:
        self._send_json(status, {"error": code, "detail": detail})

    def do_GET(self):
        try:
            self._route()
        except (QuerySyntaxError, EmptyQuery, ParseError, ValueError) as e:
            self._fail(400, _error_code(e), str(e))
        except _NOT_FOUND as e:
            self._fail(404, _error_code(e), str(e))
        except GeosearchError as e:
            self._fail(400, _error_code(e), str(e))
        except Exception as e:  # pragma: no cover - defensive
            self._fail(500, "internal", f"{type(e).__name__}: {e}")

    def _route(self) -> None:
        url = urlsplit(self.path)
        params = parse_qs(url.query)
        if url.path == "/healthz":
            self._send_json(
                200,
                {
                    "status": "ok",
                    "documents": len(self.engine.documents),
                    "entries": len(self.engine.gazetteer),
                },
            )
        elif url.path == "/search":
            self._search(params)
        elif url.path.startswith("/place/"):
            self._place(url.path[len("/place/"):])
        elif url.path == "/route":
            self._route_query(params)
        else:
            self._fail(404, "not_found", f"no resource at {url.path}")

    def _param(self, params: dict, name: str) -> str:
        values = params.get(name)
        if not values or not values[0]:
            raise ValueError(f"missing query parameter {name!r}")
        return values[0]

    def _search(self, params: dict) -> None:
        q = self._param(params, "q")
        config = self.engine.config
        if "limit" in params:
            raw = self._param(params, "limit")
            if not raw.isdigit() or int(raw) < 1:
                raise ValueError(f"limit must be a positive integer, got {raw!r}")
            config = replace(config, top_k=int(raw))
        self._send_json(200, search_response(self.engine, q, config))

    def _place(self, raw: str) -> None:
        if not raw.isdigit():
            raise ValueError(f"place id must be a positive integer, got {raw!r}")
        place_id = int(raw)
        accept = self.headers.get("Accept", "")
        if NTRIPLES_TYPE in accept:
            self._send(200, place_ntriples(self.engine, place_id), NTRIPLES_TYPE)
        else:
            self._send_json(200, place_record(self.engine, place_id))

    def _route_query(self, params: dict) -> None:
        endpoints = []
        for name in ("from", "to"):
            raw = self._param(params, name)
            if not raw.lstrip("-").isdigit():
                raise ValueError(f"{name} must be an integer node id, got {raw!r}")
            endpoints.append(int(raw))
        self._send_json(200, route_record(self.engine, endpoints[0], endpoints[1]))


def make_server(engine: Engine, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """A ready-to-serve HTTP server; port 0 picks a free port."""
    handler = type("BoundHandler", (_Handler,), {"engine": engine})
    return ThreadingHTTPServer((host, port), handler)
