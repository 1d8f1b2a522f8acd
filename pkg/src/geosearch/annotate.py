"""Toponym extraction, homonym resolution, and document footprints.

Extraction is a greedy longest-match scan of token n-grams against the
gazetteer's folded name index. Ambiguous mentions are resolved by spatial
coherence: start every mention at its highest-population sense, then give
each mention one chance to move to the candidate minimizing the summed
distance to the other mentions' starting senses. The single round is
computed against the initial assignment, so the outcome does not depend on
mention order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .gazetteer import Gazetteer, entity_iri
from .geo import GeoPoint, BBox, bbox_of_points, haversine_km
from .folding import tokenize
from .rdf import Literal, Triple
from .spatial import Geometry
from .textindex import Document

ANNOTATION_NS = "http://example.org/sir#"
PRED_MENTIONS_PLACE = ANNOTATION_NS + "mentionsPlace"
PRED_FOOTPRINT = ANNOTATION_NS + "footprint"

MAX_NGRAM = 5


@dataclass(frozen=True)
class Mention:
    """A matched toponym span over the document's token list."""

    doc_id: str
    start: int
    end: int
    surface: str  # folded tokens of the span, space separated
    candidates: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError("mention span must be non-empty")
        if not self.candidates:
            raise ValueError("mention needs at least one candidate")


@dataclass(frozen=True)
class DocAnnotation:
    doc_id: str
    resolved: tuple[tuple[Mention, int], ...]
    footprint: Geometry | None
    triples: tuple[Triple, ...]


def annotation_tokens(doc: Document) -> list[str]:
    return tokenize(doc.title) + tokenize(doc.body)


def extract_toponyms(doc: Document, gazetteer: Gazetteer) -> list[Mention]:
    """Longest-first, left-to-right, non-overlapping matches of up to 5 tokens."""
    tokens = annotation_tokens(doc)
    mentions: list[Mention] = []
    i = 0
    while i < len(tokens):
        matched = False
        for n in range(min(MAX_NGRAM, len(tokens) - i), 0, -1):
            surface = " ".join(tokens[i : i + n])
            ids = gazetteer.lookup_name(surface)
            if ids:
                mentions.append(
                    Mention(doc.doc_id, i, i + n, surface, tuple(sorted(ids)))
                )
                i += n
                matched = True
                break
        if not matched:
            i += 1
    return mentions


def _preferred(candidates: tuple[int, ...], gazetteer: Gazetteer) -> int:
    return min(candidates, key=lambda c: (-gazetteer.entries[c].population, c))


def disambiguate(mentions: list[Mention], gazetteer: Gazetteer) -> list[tuple[Mention, int]]:
    """Pick one sense per mention; see the module docstring for the procedure."""
    if not mentions:
        return []
    initial = [_preferred(m.candidates, gazetteer) for m in mentions]
    if len(mentions) == 1:
        return [(mentions[0], initial[0])]
    resolved = []
    for k, mention in enumerate(mentions):
        others = [gazetteer.entries[initial[j]].location for j in range(len(mentions)) if j != k]

        def coherence(candidate: int) -> tuple[float, int, int]:
            loc = gazetteer.entries[candidate].location
            total = sum(haversine_km(loc, other) for other in others)
            return (total, -gazetteer.entries[candidate].population, candidate)

        resolved.append((mention, min(mention.candidates, key=coherence)))
    return resolved


def annotate(doc: Document, gazetteer: Gazetteer) -> DocAnnotation:
    """Resolve every toponym and derive the document footprint and triples.

    One place gives a point footprint, several give the bbox of their
    points, none gives no footprint and no triples.
    """
    resolved = disambiguate(extract_toponyms(doc, gazetteer), gazetteer)
    place_ids = sorted({place_id for _, place_id in resolved})
    footprint: Geometry | None = None
    triples: list[Triple] = []
    if place_ids:
        points = [gazetteer.entries[place_id].location for place_id in place_ids]
        footprint = points[0] if len(points) == 1 else bbox_of_points(points)
        triples = [
            Triple(doc.uri, PRED_MENTIONS_PLACE, entity_iri(place_id))
            for place_id in place_ids
        ]
        triples.append(Triple(doc.uri, PRED_FOOTPRINT, Literal(footprint_wkt(footprint))))
    return DocAnnotation(doc.doc_id, tuple(resolved), footprint, tuple(triples))


def footprint_wkt(geom: Geometry) -> str:
    """WKT rendering (lon-lat axis order) of a point or bbox footprint."""
    if isinstance(geom, GeoPoint):
        return f"POINT ({geom.lon!r} {geom.lat!r})"
    if isinstance(geom, BBox):
        ring = [
            (geom.min_lon, geom.min_lat),
            (geom.max_lon, geom.min_lat),
            (geom.max_lon, geom.max_lat),
            (geom.min_lon, geom.max_lat),
            (geom.min_lon, geom.min_lat),
        ]
        inner = ", ".join(f"{lon!r} {lat!r}" for lon, lat in ring)
        return f"POLYGON (({inner}))"
    raise ValueError(f"no WKT form for {type(geom).__name__}")


_WKT_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_WKT_POINT_RE = re.compile(rf"^POINT \(({_WKT_NUM}) ({_WKT_NUM})\)$")
_WKT_POLYGON_RE = re.compile(r"^POLYGON \(\(([^()]+)\)\)$")


def parse_footprint_wkt(text: str) -> Geometry:
    """Inverse of footprint_wkt for the two shapes it produces."""
    m = _WKT_POINT_RE.match(text)
    if m:
        return GeoPoint(float(m.group(2)), float(m.group(1)))
    m = _WKT_POLYGON_RE.match(text)
    if m:
        pairs = []
        for chunk in m.group(1).split(","):
            parts = chunk.split()
            if len(parts) != 2:
                raise ParseError(f"bad WKT ring coordinate {chunk!r}")
            lon, lat = (float(parts[0]), float(parts[1]))
            pairs.append((lat, lon))
        lats = [lat for lat, _ in pairs]
        lons = [lon for _, lon in pairs]
        return BBox(min(lats), min(lons), max(lats), max(lons))
    raise ParseError(f"unsupported WKT footprint {text!r}")
