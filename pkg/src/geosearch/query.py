"""Query language parsing and the retrieval pipeline.

Grammar (keywords are case-insensitive):

    query   := terms? clause?
    terms   := token+
    clause  := "IN" phrase | "NEAR" ( phrase | point ) within?
    point   := "(" number "," number ")"
    within  := "WITHIN" number ("km" | "mi")

A phrase runs to the end of the input or to a WITHIN keyword. Miles are
converted to kilometres while parsing; when WITHIN is absent the radius
stays unset and the engine's configured default applies at execution time.
Syntax errors report the UTF-8 byte offset of the offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

from .errors import EmptyQuery, QuerySyntaxError
from .expand import expand_terms, place_footprint, resolve_place
from .folding import tokenize
from .geo import GeoPoint
from .rank import InRegion, NearCenter, RankConfig, SpatialTarget, combine, spatial_score
from .textindex import bm25_score, search_terms

if TYPE_CHECKING:  # pragma: no cover
    from .config import EngineConfig
    from .snapshot import Engine

KM_PER_MILE = 1.609344
_NUMBER_RE = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)$")


@dataclass(frozen=True)
class InPlace:
    place: str


@dataclass(frozen=True)
class NearPlace:
    place: str
    radius_km: float | None = None


@dataclass(frozen=True)
class NearPoint:
    point: GeoPoint
    radius_km: float | None = None


SpatialClause = Union[InPlace, NearPlace, NearPoint]


@dataclass(frozen=True)
class QueryAst:
    terms: tuple[str, ...]
    spatial: SpatialClause | None


@dataclass(frozen=True)
class ScoredResult:
    doc_id: str
    text_score: float
    spatial_score: float
    combined: float
    places: tuple[int, ...]


@dataclass(frozen=True)
class SearchOutcome:
    """Ranked results plus the candidate count before top-k truncation."""

    results: tuple[ScoredResult, ...]
    total_candidates: int


# ---------------------------------------------------------------------------
# lexing and parsing

@dataclass(frozen=True)
class _Token:
    kind: str  # "word", "(", ")", ","
    text: str
    start: int  # character offset into the query


def _lex(q: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(q):
        ch = q[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "(),":
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        j = i
        while j < len(q) and not q[j].isspace() and q[j] not in "(),":
            j += 1
        tokens.append(_Token("word", q[i:j], i))
        i = j
    return tokens


def _is_keyword(token: _Token | None, word: str) -> bool:
    return token is not None and token.kind == "word" and token.text.casefold() == word


class _Parser:
    def __init__(self, q: str):
        self.q = q
        self.tokens = _lex(q)
        self.pos = 0

    def byte_offset(self, char_pos: int) -> int:
        return len(self.q[:char_pos].encode("utf-8"))

    def fail(self, message: str, token: _Token | None = None):
        char_pos = token.start if token is not None else len(self.q)
        raise QuerySyntaxError(message, self.byte_offset(char_pos))

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token | None:
        token = self.peek()
        if token is not None:
            self.pos += 1
        return token

    def parse(self) -> QueryAst:
        if not self.tokens:
            raise QuerySyntaxError("empty query", 0)
        terms = self.parse_terms()
        spatial = None
        nxt = self.peek()
        if nxt is not None:
            if _is_keyword(nxt, "in"):
                self.take()
                spatial = InPlace(self.parse_phrase("place name after IN"))
                within = self.peek()
                if _is_keyword(within, "within"):
                    self.fail("WITHIN is not allowed after IN", within)
            elif _is_keyword(nxt, "near"):
                self.take()
                if self.peek() is not None and self.peek().kind == "(":
                    point = self.parse_point()
                    spatial = NearPoint(point, self.parse_within())
                else:
                    place = self.parse_phrase("place name or point after NEAR")
                    spatial = NearPlace(place, self.parse_within())
            else:
                self.fail(f"unexpected {nxt.text!r}", nxt)
        trailing = self.peek()
        if trailing is not None:
            self.fail(f"unexpected trailing input {trailing.text!r}", trailing)
        return QueryAst(tuple(terms), spatial)

    def parse_terms(self) -> list[str]:
        terms = []
        while True:
            token = self.peek()
            if token is None or _is_keyword(token, "in") or _is_keyword(token, "near"):
                return terms
            if token.kind != "word":
                self.fail(f"unexpected {token.text!r}", token)
            terms.append(token.text)
            self.take()

    def parse_phrase(self, what: str) -> str:
        words = []
        while True:
            token = self.peek()
            if token is None or _is_keyword(token, "within"):
                break
            if token.kind != "word":
                break
            words.append(token.text)
            self.take()
        if not words:
            self.fail(f"expected {what}", self.peek())
        return " ".join(words)

    def parse_number(self, what: str) -> tuple[float, _Token]:
        token = self.take()
        if token is None or token.kind != "word" or not _NUMBER_RE.match(token.text):
            self.fail(f"expected {what}", token)
        return float(token.text), token

    def parse_point(self) -> GeoPoint:
        self.take()  # "("
        lat, lat_token = self.parse_number("latitude")
        comma = self.take()
        if comma is None or comma.kind != ",":
            self.fail("expected ',' in point", comma)
        lon, lon_token = self.parse_number("longitude")
        closing = self.take()
        if closing is None or closing.kind != ")":
            self.fail("expected ')' after point", closing)
        if not -90.0 <= lat <= 90.0:
            self.fail(f"latitude {lat} outside [-90, 90]", lat_token)
        if not -180.0 <= lon <= 180.0:
            self.fail(f"longitude {lon} outside [-180, 180]", lon_token)
        return GeoPoint(lat, lon)

    def parse_within(self) -> float | None:
        token = self.peek()
        if not _is_keyword(token, "within"):
            return None
        self.take()
        value, value_token = self.parse_number("radius after WITHIN")
        if value <= 0:
            self.fail("radius must be positive", value_token)
        unit = self.take()
        if unit is None or unit.kind != "word" or unit.text.casefold() not in ("km", "mi"):
            self.fail("expected unit km or mi", unit)
        return value * KM_PER_MILE if unit.text.casefold() == "mi" else value


def parse_query(q: str) -> QueryAst:
    """Parse a query string; raises QuerySyntaxError with a byte offset."""
    return _Parser(q).parse()


def unparse(ast: QueryAst) -> str:
    """Canonical text for an AST; parse(unparse(parse(q))) == parse(q)."""
    parts = list(ast.terms)
    clause = ast.spatial
    if isinstance(clause, InPlace):
        parts += ["IN", clause.place]
    elif isinstance(clause, NearPlace):
        parts += ["NEAR", clause.place]
    elif isinstance(clause, NearPoint):
        parts += ["NEAR", f"({clause.point.lat!r}, {clause.point.lon!r})"]
    if isinstance(clause, (NearPlace, NearPoint)) and clause.radius_km is not None:
        parts += ["WITHIN", repr(clause.radius_km), "km"]
    return " ".join(parts)


# ---------------------------------------------------------------------------
# execution

def resolve_spatial(clause: SpatialClause, engine: "Engine", config: "EngineConfig") -> SpatialTarget:
    """Turn a parsed clause into a concrete region or buffer."""
    if isinstance(clause, InPlace):
        sense = resolve_place(clause.place, engine.gazetteer)
        return InRegion(place_footprint(sense.place_id, engine.gazetteer, config.footprint_pad_deg))
    if isinstance(clause, NearPlace):
        sense = resolve_place(clause.place, engine.gazetteer)
        center = engine.gazetteer.get(sense.place_id).location
        return NearCenter(center, clause.radius_km or config.default_radius_km)
    return NearCenter(clause.point, clause.radius_km or config.default_radius_km)


def run(ast: QueryAst, engine: "Engine", config: "EngineConfig | None" = None) -> SearchOutcome:
    """Expansion, boolean retrieval, spatial filtering, and ranking."""
    cfg = config if config is not None else engine.config
    if not ast.terms and ast.spatial is None:
        raise EmptyQuery("query has neither terms nor a spatial clause")

    groups = expand_terms(tokenize(" ".join(ast.terms)), engine.lexicon)
    candidates = search_terms(engine.text_index, groups)

    target: SpatialTarget | None = None
    buffer_hits: dict = {}
    if ast.spatial is not None:
        target = resolve_spatial(ast.spatial, engine, cfg)
        if isinstance(target, InRegion):
            candidates &= engine.spatial_index.query_region(target.region)
        else:
            buffer_hits = engine.spatial_index.query_buffer(target.center, target.radius_km)
            candidates &= set(buffer_hits)

    score_terms = sorted({term for group in groups for term in group})
    text_scores = {
        doc_id: bm25_score(engine.text_index, score_terms, doc_id) for doc_id in candidates
    }
    if target is None:
        spatial_scores = {doc_id: 1.0 for doc_id in candidates}
    else:
        spatial_scores = {
            doc_id: spatial_score(engine.footprints[doc_id], target) for doc_id in candidates
        }

    ranked = combine(text_scores, spatial_scores, RankConfig(cfg.alpha, cfg.top_k))
    results = tuple(
        ScoredResult(
            doc_id=doc_id,
            text_score=text_scores[doc_id],
            spatial_score=spatial_scores[doc_id],
            combined=combined_score,
            places=engine.doc_places.get(doc_id, ()),
        )
        for doc_id, combined_score in ranked
    )
    return SearchOutcome(results, len(candidates))


def execute(ast: QueryAst, engine: "Engine", config: "EngineConfig | None" = None) -> list[ScoredResult]:
    """Ranked results for a parsed query (see `run` for the full outcome)."""
    return list(run(ast, engine, config).results)
