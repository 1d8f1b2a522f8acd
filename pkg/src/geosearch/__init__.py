"""Geographic search: gazetteer, text index, spatial index, query language.

The pieces compose bottom-up: `gazetteer` and `textindex` hold the data,
`annotate` links documents to places, `spatial` and `rank` serve queries
parsed by `query`, and `snapshot` ties everything into a persistable
engine used by the CLI and the HTTP service.
"""

from .config import EngineConfig, load_config
from .errors import (
    EmptyQuery,
    GeosearchError,
    NoPath,
    ParseError,
    QuerySyntaxError,
    SnapshotError,
    UnknownId,
    UnknownNode,
    UnknownPlace,
)
from .gazetteer import Gazetteer, GazetteerEntry, entity_iri, load_tsv
from .geo import BBox, GeoPoint, PathNetwork, Polygon, haversine_km, shortest_path
from .query import QueryAst, ScoredResult, SearchOutcome, execute, parse_query, run, unparse
from .snapshot import Engine, build_engine, build_snapshot, load_snapshot
from .spatial import SpatialIndex
from .textindex import Document, InvertedIndex, index_docs, load_corpus_jsonl

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "Document",
    "EmptyQuery",
    "Engine",
    "EngineConfig",
    "Gazetteer",
    "GazetteerEntry",
    "GeoPoint",
    "GeosearchError",
    "InvertedIndex",
    "NoPath",
    "ParseError",
    "PathNetwork",
    "Polygon",
    "QueryAst",
    "QuerySyntaxError",
    "ScoredResult",
    "SearchOutcome",
    "SnapshotError",
    "SpatialIndex",
    "UnknownId",
    "UnknownNode",
    "UnknownPlace",
    "__version__",
    "build_engine",
    "build_snapshot",
    "entity_iri",
    "execute",
    "haversine_km",
    "index_docs",
    "load_config",
    "load_corpus_jsonl",
    "load_snapshot",
    "load_tsv",
    "parse_query",
    "run",
    "shortest_path",
    "unparse",
]
