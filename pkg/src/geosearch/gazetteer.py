"""GeoNames-style gazetteer: TSV and RDF ingestion, name lookup, hierarchy, export.

The TSV format is ten tab-separated columns with no header row:

    id  name  alt_names  lat  lon  feature_class  feature_code  parent_id  population  elevation

alt_names is comma separated and may be empty, parent_id and elevation may be
empty, an empty population means "unknown" and is stored as 0. Alternate
names are kept in lexicographic order so that loading, exporting to RDF and
reloading reproduces entries field for field.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .errors import DuplicateId, MissingField, ParseError, UnknownId
from .folding import fold
from .geo import GeoPoint
from .rdf import Literal, Triple, object_key, parse_ntriples

GEONAMES_NS = "http://www.geonames.org/ontology#"
WGS84_NS = "http://www.w3.org/2003/01/geo/wgs84_pos#"

PRED_NAME = GEONAMES_NS + "name"
PRED_ALTERNATE_NAME = GEONAMES_NS + "alternateName"
PRED_FEATURE_CLASS = GEONAMES_NS + "featureClass"
PRED_FEATURE_CODE = GEONAMES_NS + "featureCode"
PRED_PARENT = GEONAMES_NS + "parentFeature"
PRED_POPULATION = GEONAMES_NS + "population"
PRED_LAT = WGS84_NS + "lat"
PRED_LONG = WGS84_NS + "long"

FEATURE_CLASSES = frozenset("AHLPRSTUV")

# Entities ingested from RDF may lack a feature class/code; these defaults
# keep such entries loadable while staying out of the TSV path entirely.
DEFAULT_FEATURE_CLASS = "S"
DEFAULT_FEATURE_CODE = "UNK"

_ENTITY_IRI_RE = re.compile(r"^https://sws\.geonames\.org/([0-9]+)/$")


def entity_iri(place_id: int) -> str:
    return f"https://sws.geonames.org/{place_id}/"


def parse_entity_iri(iri: str) -> int | None:
    m = _ENTITY_IRI_RE.match(iri)
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class GazetteerEntry:
    id: int
    name: str
    alt_names: tuple[str, ...]
    location: GeoPoint
    feature_class: str
    feature_code: str
    parent_id: int | None
    population: int
    elevation_m: int | None = None

    def __post_init__(self):
        if self.id <= 0:
            raise ValueError(f"id must be positive, got {self.id}")
        if not self.name:
            raise ValueError("name must be non-empty")
        if self.feature_class not in FEATURE_CLASSES:
            raise ValueError(f"feature class {self.feature_class!r} not one of {''.join(sorted(FEATURE_CLASSES))}")
        if not self.feature_code:
            raise ValueError("feature code must be non-empty")
        if self.population < 0:
            raise ValueError(f"population must be non-negative, got {self.population}")
        if any(not alt for alt in self.alt_names):
            raise ValueError("alternate names must be non-empty")


class Gazetteer:
    """Immutable entry collection with folded-name and hierarchy indexes."""

    def __init__(self, entries: Iterable[GazetteerEntry]):
        self.entries: dict[int, GazetteerEntry] = {}
        for entry in entries:
            if entry.id in self.entries:
                raise DuplicateId(f"duplicate gazetteer id {entry.id}")
            self.entries[entry.id] = entry
        self._validate_hierarchy()
        self._name_index: dict[str, frozenset[int]] = {}
        collecting: dict[str, set[int]] = {}
        for entry in self.entries.values():
            for name in (entry.name, *entry.alt_names):
                collecting.setdefault(fold(name), set()).add(entry.id)
        self._name_index = {k: frozenset(v) for k, v in collecting.items()}
        children: dict[int, list[int]] = {}
        for entry in self.entries.values():
            if entry.parent_id is not None:
                children.setdefault(entry.parent_id, []).append(entry.id)
        self._children = {pid: tuple(sorted(ids)) for pid, ids in children.items()}

    def _validate_hierarchy(self) -> None:
        for entry in self.entries.values():
            if entry.parent_id is not None and entry.parent_id not in self.entries:
                raise ParseError(f"entry {entry.id}: parent {entry.parent_id} is not defined")
        # walk parent chains; a chain longer than the entry count must loop
        for entry in self.entries.values():
            seen = {entry.id}
            cursor = entry.parent_id
            while cursor is not None:
                if cursor in seen:
                    raise ParseError(f"entry {entry.id}: ancestor cycle through {cursor}")
                seen.add(cursor)
                cursor = self.entries[cursor].parent_id

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[GazetteerEntry]:
        return iter(self.entries.values())

    def __contains__(self, place_id: int) -> bool:
        return place_id in self.entries

    def get(self, place_id: int) -> GazetteerEntry:
        try:
            return self.entries[place_id]
        except KeyError:
            raise UnknownId(f"unknown gazetteer id {place_id}") from None

    def lookup_name(self, name: str) -> frozenset[int]:
        """Ids whose canonical or alternate folded name equals folded(name)."""
        return self._name_index.get(fold(name), frozenset())

    def children(self, place_id: int) -> tuple[int, ...]:
        return self._children.get(place_id, ())

    def descendants(self, place_id: int) -> frozenset[int]:
        """Transitive closure of the child relation, excluding the entry itself."""
        if place_id not in self.entries:
            raise UnknownId(f"unknown gazetteer id {place_id}")
        out: set[int] = set()
        frontier = list(self.children(place_id))
        while frontier:
            node = frontier.pop()
            if node not in out:
                out.add(node)
                frontier.extend(self.children(node))
        return frozenset(out)

    def export_rdf(self, place_id: int) -> list[Triple]:
        """Entry as triples, sorted by (predicate IRI, object lexical form).

        A zero population means "unknown" and is omitted; elevation has no
        predicate in this vocabulary and is never exported.
        """
        entry = self.get(place_id)
        subject = entity_iri(entry.id)
        triples = [
            Triple(subject, PRED_NAME, Literal(entry.name)),
            Triple(subject, PRED_FEATURE_CLASS, Literal(entry.feature_class)),
            Triple(subject, PRED_FEATURE_CODE, Literal(entry.feature_code)),
            Triple(subject, PRED_LAT, Literal(repr(entry.location.lat))),
            Triple(subject, PRED_LONG, Literal(repr(entry.location.lon))),
        ]
        triples.extend(Triple(subject, PRED_ALTERNATE_NAME, Literal(alt)) for alt in entry.alt_names)
        if entry.parent_id is not None:
            triples.append(Triple(subject, PRED_PARENT, entity_iri(entry.parent_id)))
        if entry.population > 0:
            triples.append(Triple(subject, PRED_POPULATION, Literal(str(entry.population))))
        triples.sort(key=lambda t: (t.predicate, object_key(t.object)))
        return triples


def load_tsv(stream: IO[str] | Iterable[str]) -> Gazetteer:
    """Parse gazetteer TSV lines; errors carry the 1-based line number."""
    entries: list[GazetteerEntry] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        cols = line.split("\t")
        if len(cols) != 10:
            raise ParseError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
        try:
            place_id = int(cols[0])
        except ValueError:
            raise ParseError(f"non-integer id {cols[0]!r}", lineno) from None
        if place_id in seen:
            raise DuplicateId(f"line {lineno}: id {place_id} already defined at line {seen[place_id]}")
        seen[place_id] = lineno
        alt_names = tuple(sorted(a for a in cols[2].split(",") if a))
        try:
            lat = float(cols[3])
            lon = float(cols[4])
        except ValueError:
            raise ParseError(f"non-numeric coordinates {cols[3]!r}, {cols[4]!r}", lineno) from None
        parent_id: int | None = None
        if cols[7]:
            try:
                parent_id = int(cols[7])
            except ValueError:
                raise ParseError(f"non-integer parent id {cols[7]!r}", lineno) from None
        try:
            population = int(cols[8]) if cols[8] else 0
        except ValueError:
            raise ParseError(f"non-integer population {cols[8]!r}", lineno) from None
        elevation: int | None = None
        if cols[9]:
            try:
                elevation = int(cols[9])
            except ValueError:
                raise ParseError(f"non-integer elevation {cols[9]!r}", lineno) from None
        try:
            entry = GazetteerEntry(
                id=place_id,
                name=cols[1],
                alt_names=alt_names,
                location=GeoPoint(lat, lon),
                feature_class=cols[5],
                feature_code=cols[6],
                parent_id=parent_id,
                population=population,
                elevation_m=elevation,
            )
        except ValueError as e:
            raise ParseError(str(e), lineno) from None
        entries.append(entry)
    return Gazetteer(entries)


def load_ntriples(stream: IO[str] | Iterable[str]) -> Gazetteer:
    """Build a gazetteer from N-Triples using the GeoNames predicate subset.

    Unknown predicates and subjects outside the sws.geonames.org namespace
    are ignored. An entity missing its name or either coordinate raises
    MissingField.
    """
    triples = parse_ntriples(stream)
    scalar_preds = {
        PRED_NAME: "name",
        PRED_FEATURE_CLASS: "feature class",
        PRED_FEATURE_CODE: "feature code",
        PRED_LAT: "latitude",
        PRED_LONG: "longitude",
        PRED_POPULATION: "population",
        PRED_PARENT: "parent",
    }
    entities: dict[int, dict] = {}
    order: list[int] = []
    for t in triples:
        place_id = parse_entity_iri(t.subject)
        if place_id is None:
            continue
        if place_id not in entities:
            entities[place_id] = {"alts": []}
            order.append(place_id)
        record = entities[place_id]
        if t.predicate == PRED_ALTERNATE_NAME:
            if not isinstance(t.object, Literal):
                raise ParseError(f"{t.subject}: alternateName object must be a literal")
            record["alts"].append(t.object.lexical)
            continue
        if t.predicate not in scalar_preds:
            continue
        field = scalar_preds[t.predicate]
        if field in record:
            raise ParseError(f"{t.subject}: duplicate {field}")
        if t.predicate == PRED_PARENT:
            if not isinstance(t.object, str):
                raise ParseError(f"{t.subject}: parentFeature object must be an IRI")
            parent_id = parse_entity_iri(t.object)
            if parent_id is None:
                raise ParseError(f"{t.subject}: parentFeature {t.object!r} is not an entity IRI")
            record[field] = parent_id
        else:
            if not isinstance(t.object, Literal):
                raise ParseError(f"{t.subject}: {field} object must be a literal")
            record[field] = t.object.lexical

    entries = []
    for place_id in order:
        record = entities[place_id]
        iri = entity_iri(place_id)
        if "name" not in record:
            raise MissingField(f"{iri}: missing name")
        if "latitude" not in record or "longitude" not in record:
            raise MissingField(f"{iri}: missing coordinates")
        try:
            lat = float(record["latitude"])
            lon = float(record["longitude"])
        except ValueError:
            raise ParseError(f"{iri}: non-numeric coordinates") from None
        try:
            population = int(record["population"]) if "population" in record else 0
        except ValueError:
            raise ParseError(f"{iri}: non-integer population") from None
        try:
            entry = GazetteerEntry(
                id=place_id,
                name=record["name"],
                alt_names=tuple(sorted(record["alts"])),
                location=GeoPoint(lat, lon),
                feature_class=record.get("feature class", DEFAULT_FEATURE_CLASS),
                feature_code=record.get("feature code", DEFAULT_FEATURE_CODE),
                parent_id=record.get("parent"),
                population=population,
            )
        except ValueError as e:
            raise ParseError(f"{iri}: {e}") from None
        entries.append(entry)
    return Gazetteer(entries)
