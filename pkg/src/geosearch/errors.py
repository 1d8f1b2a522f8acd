"""Exception types shared across the package."""

from __future__ import annotations


class GeosearchError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GeosearchError):
    """Malformed input data (TSV, N-Triples, JSON Lines, lexicon, config)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class QuerySyntaxError(GeosearchError):
    """Malformed query string; `offset` is the UTF-8 byte offset of the problem."""

    def __init__(self, message: str, offset: int = 0):
        self.offset = offset
        super().__init__(f"byte {offset}: {message}")


class DuplicateId(GeosearchError):
    """The same gazetteer or index item id was supplied twice."""


class DuplicateDocId(GeosearchError):
    """The same document id was supplied twice."""


class UnknownId(GeosearchError):
    """A gazetteer id that does not exist."""


class UnknownDoc(GeosearchError):
    """A document id that was never indexed."""


class UnknownNode(GeosearchError):
    """A routing node that is not part of the network."""


class UnknownPlace(GeosearchError):
    """A place name with no gazetteer match."""


class NoPath(GeosearchError):
    """The requested route endpoints are not connected."""


class MissingField(GeosearchError):
    """An RDF entity lacks a required property (name or coordinates)."""


class CyclicHierarchy(GeosearchError):
    """Concept parent links form a cycle."""


class AmbiguousTerm(GeosearchError):
    """A lexicon term is claimed by more than one concept."""


class MismatchedDocSets(GeosearchError):
    """Text and spatial score maps cover different documents."""


class EmptyQuery(GeosearchError):
    """A query with neither terms nor a spatial clause."""


class SnapshotError(GeosearchError):
    """A snapshot directory is missing files or fails its integrity stamps."""
