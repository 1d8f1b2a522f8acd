"""Concept-lexicon query expansion and place-name resolution.

Two kinds of vocabulary variation are handled here: synonyms (different
words, one concept) through term-set expansion, and homonyms (one name,
different places) through gazetteer sense selection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Sequence

from .errors import AmbiguousTerm, CyclicHierarchy, ParseError, UnknownPlace
from .folding import fold, tokenize
from .gazetteer import Gazetteer
from .geo import BBox, GeoPoint, haversine_km

DEFAULT_FOOTPRINT_PAD_DEG = 0.1


@dataclass(frozen=True)
class Concept:
    concept_id: str
    preferred: str
    synonyms: tuple[str, ...]
    parent: str | None


class ConceptLexicon:
    """Concepts with a folded term index and a parent/child hierarchy.

    A parent id does not have to name a defined concept; undefined parents
    act as abstract groupings with no terms of their own.
    """

    def __init__(self, concepts: Sequence[Concept]):
        self.concepts: dict[str, Concept] = {}
        for concept in concepts:
            if concept.concept_id in self.concepts:
                raise ParseError(f"duplicate concept id {concept.concept_id!r}")
            self.concepts[concept.concept_id] = concept
        self._check_acyclic()
        children: dict[str, list[str]] = {}
        for concept in self.concepts.values():
            if concept.parent is not None:
                children.setdefault(concept.parent, []).append(concept.concept_id)
        self._children = {k: tuple(v) for k, v in children.items()}

        self.term_index: dict[str, str] = {}
        self.max_term_tokens = 1
        for concept in self.concepts.values():
            for term in (concept.preferred, *concept.synonyms):
                key = " ".join(tokenize(term))
                if not key:
                    raise ParseError(f"concept {concept.concept_id!r}: term {term!r} folds to nothing")
                owner = self.term_index.get(key)
                if owner is not None and owner != concept.concept_id:
                    raise AmbiguousTerm(f"term {term!r} belongs to both {owner!r} and {concept.concept_id!r}")
                self.term_index[key] = concept.concept_id
                self.max_term_tokens = max(self.max_term_tokens, key.count(" ") + 1)
        self._expansion_cache: dict[str, frozenset[str]] = {}

    def _check_acyclic(self) -> None:
        for start in self.concepts:
            seen = {start}
            cursor = self.concepts[start].parent
            while cursor is not None and cursor in self.concepts:
                if cursor in seen:
                    raise CyclicHierarchy(f"concept hierarchy cycle through {cursor!r}")
                seen.add(cursor)
                cursor = self.concepts[cursor].parent

    def __len__(self) -> int:
        return len(self.concepts)

    def children(self, concept_id: str) -> tuple[str, ...]:
        return self._children.get(concept_id, ())

    def expansion_tokens(self, concept_id: str) -> frozenset[str]:
        """Tokens of the concept's terms plus all descendant concepts' terms."""
        cached = self._expansion_cache.get(concept_id)
        if cached is not None:
            return cached
        tokens: set[str] = set()
        frontier = [concept_id]
        visited: set[str] = set()
        while frontier:
            cid = frontier.pop()
            if cid in visited:
                continue
            visited.add(cid)
            concept = self.concepts[cid]
            for term in (concept.preferred, *concept.synonyms):
                tokens.update(tokenize(term))
            frontier.extend(self.children(cid))
        result = frozenset(tokens)
        self._expansion_cache[concept_id] = result
        return result


EMPTY_LEXICON = ConceptLexicon(())


def load_lexicon(stream: IO[str] | str) -> ConceptLexicon:
    """Read a JSON array of {id, preferred, synonyms, parent?} objects."""
    try:
        data = json.load(stream) if hasattr(stream, "read") else json.loads(stream)
    except json.JSONDecodeError as e:
        raise ParseError(f"bad JSON: {e.msg} (line {e.lineno})") from None
    if not isinstance(data, list):
        raise ParseError("lexicon must be a JSON array")
    concepts = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise ParseError(f"lexicon entry {i} must be an object")
        concept_id = item.get("id")
        preferred = item.get("preferred")
        if not isinstance(concept_id, str) or not concept_id:
            raise ParseError(f"lexicon entry {i}: missing id")
        if not isinstance(preferred, str) or not preferred:
            raise ParseError(f"lexicon entry {i}: missing preferred term")
        synonyms = item.get("synonyms", [])
        if not isinstance(synonyms, list) or any(not isinstance(s, str) for s in synonyms):
            raise ParseError(f"lexicon entry {i}: synonyms must be a list of strings")
        parent = item.get("parent")
        if parent is not None and (not isinstance(parent, str) or not parent):
            raise ParseError(f"lexicon entry {i}: parent must be a non-empty string")
        concepts.append(Concept(concept_id, preferred, tuple(synonyms), parent))
    return ConceptLexicon(concepts)


def expand_terms(terms: Sequence[str], lexicon: ConceptLexicon) -> list[set[str]]:
    """Group query tokens and widen each group with concept vocabulary.

    A greedy longest match (like toponym extraction) walks the tokens; a
    span matching a concept term becomes one group holding the original
    span tokens, the preferred and synonym tokens, and every descendant
    concept's tokens. Unmatched tokens become singleton groups, so the
    originals are always retained.

    With no lexicon at all the query degrades to plain keyword matching:
    every token lands in one disjunctive group, which is how a text-only
    engine behaves before any concept knowledge is added.
    """
    if not lexicon.concepts:
        return [set(terms)] if terms else []
    groups: list[set[str]] = []
    i = 0
    while i < len(terms):
        matched = False
        for n in range(min(lexicon.max_term_tokens, len(terms) - i), 0, -1):
            span = terms[i : i + n]
            concept_id = lexicon.term_index.get(" ".join(span))
            if concept_id is not None:
                groups.append(set(span) | lexicon.expansion_tokens(concept_id))
                i += n
                matched = True
                break
        if not matched:
            groups.append({terms[i]})
            i += 1
    return groups


@dataclass(frozen=True)
class PlaceSense:
    place_id: int
    matched_name: str
    match: str  # "canonical" or "alternate"


def resolve_place(name: str, gazetteer: Gazetteer, context: GeoPoint | None = None) -> PlaceSense:
    """Choose one gazetteer sense for a (possibly ambiguous) place name.

    With a context point the nearest sense wins; otherwise the largest
    population. Remaining ties prefer canonical-name matches, then the
    smallest id.
    """
    candidates = gazetteer.lookup_name(name)
    if not candidates:
        raise UnknownPlace(f"no gazetteer entry named {name!r}")
    folded = fold(name)

    def sense(place_id: int) -> PlaceSense:
        entry = gazetteer.entries[place_id]
        if fold(entry.name) == folded:
            return PlaceSense(place_id, entry.name, "canonical")
        alt = next(a for a in entry.alt_names if fold(a) == folded)
        return PlaceSense(place_id, alt, "alternate")

    def rank(place_id: int):
        entry = gazetteer.entries[place_id]
        canonical = 0 if fold(entry.name) == folded else 1
        key = (-entry.population, canonical, place_id)
        if context is not None:
            return (haversine_km(entry.location, context),) + key
        return key

    return sense(min(candidates, key=rank))


def place_footprint(
    place_id: int, gazetteer: Gazetteer, pad_deg: float = DEFAULT_FOOTPRINT_PAD_DEG
) -> BBox:
    """Bounding box of the entry and all its descendants, padded by pad_deg.

    The pad is clamped at the world bounds, so footprints never leave the
    valid coordinate range.
    """
    points = [gazetteer.get(place_id).location]
    points.extend(gazetteer.entries[d].location for d in sorted(gazetteer.descendants(place_id)))
    return BBox(
        max(-90.0, min(p.lat for p in points) - pad_deg),
        max(-180.0, min(p.lon for p in points) - pad_deg),
        min(90.0, max(p.lat for p in points) + pad_deg),
        min(180.0, max(p.lon for p in points) + pad_deg),
    )
