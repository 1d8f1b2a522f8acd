"""Query grammar, byte-accurate error offsets, canonical unparsing, and
pipeline results compared against a from-scratch evaluation."""

import dataclasses
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geosearch.config import EngineConfig
from geosearch.annotate import annotate
from geosearch.errors import EmptyQuery, QuerySyntaxError, UnknownPlace
from geosearch.expand import (
    EMPTY_LEXICON,
    expand_terms,
    load_lexicon,
    place_footprint,
    resolve_place,
)
from geosearch.folding import tokenize
from geosearch.gazetteer import Gazetteer, GazetteerEntry
from geosearch.geo import GeoPoint, haversine_km
from geosearch.query import (
    KM_PER_MILE,
    InPlace,
    NearPlace,
    NearPoint,
    QueryAst,
    execute,
    parse_query,
    resolve_spatial,
    run,
    unparse,
)
from geosearch.rank import InRegion, NearCenter, spatial_score
from geosearch.snapshot import build_engine
from geosearch.spatial import geometry_intersects_region, representative_point
from geosearch.textindex import Document, bm25_score, index_docs


class TestParse:
    def test_terms_only(self):
        ast = parse_query("lodging hotels")
        assert ast == QueryAst(("lodging", "hotels"), None)

    def test_in_clause(self):
        ast = parse_query("lodging hotels IN Hyderabad")
        assert ast == QueryAst(("lodging", "hotels"), InPlace("Hyderabad"))

    def test_in_clause_without_terms(self):
        assert parse_query("IN New York") == QueryAst((), InPlace("New York"))

    def test_multi_word_place(self):
        ast = parse_query("stay IN Deccan Plateau")
        assert ast.spatial == InPlace("Deccan Plateau")

    def test_near_place(self):
        ast = parse_query("cafes NEAR Charminar")
        assert ast.spatial == NearPlace("Charminar", None)

    def test_near_place_with_radius(self):
        ast = parse_query("cafes NEAR Charminar WITHIN 2 km")
        assert ast.spatial == NearPlace("Charminar", 2.0)

    def test_miles_converted(self):
        ast = parse_query("cafes NEAR charminar within 25 mi")
        assert ast.spatial == NearPlace("charminar", 25.0 * KM_PER_MILE)
        assert ast.spatial.radius_km == 40.2336

    def test_near_point(self):
        ast = parse_query("NEAR (17.38, 78.47) WITHIN 5 km")
        assert ast.spatial == NearPoint(GeoPoint(17.38, 78.47), 5.0)

    def test_near_point_spaced_no_radius(self):
        ast = parse_query("food NEAR ( 17.38 , 78.47 )")
        assert ast.spatial == NearPoint(GeoPoint(17.38, 78.47), None)

    def test_keywords_case_insensitive(self):
        assert parse_query("x In y").spatial == InPlace("y")
        assert parse_query("x near y").spatial == NearPlace("y", None)

    def test_negative_coordinates(self):
        ast = parse_query("NEAR (-33.9, -70.7)")
        assert ast.spatial == NearPoint(GeoPoint(-33.9, -70.7), None)


def offset_of(exc_info):
    return exc_info.value.offset


class TestParseErrors:
    def test_empty_query(self):
        with pytest.raises(QuerySyntaxError, match="empty query") as e:
            parse_query("")
        assert offset_of(e) == 0
        with pytest.raises(QuerySyntaxError) as e:
            parse_query("   ")
        assert offset_of(e) == 0

    def test_missing_place_after_in(self):
        with pytest.raises(QuerySyntaxError, match="expected place name after IN") as e:
            parse_query("hotels IN")
        assert offset_of(e) == len("hotels IN")

    def test_within_after_in(self):
        with pytest.raises(QuerySyntaxError, match="WITHIN is not allowed after IN") as e:
            parse_query("hotels IN Hyderabad WITHIN 5 km")
        assert offset_of(e) == len("hotels IN Hyderabad ")

    def test_offsets_are_utf8_bytes(self):
        with pytest.raises(QuerySyntaxError) as e:
            parse_query("café NEAR")
        # the é takes two bytes, so byte 10 rather than character 9
        assert offset_of(e) == 10
        assert "byte 10" in str(e.value)

    def test_latitude_out_of_range(self):
        with pytest.raises(QuerySyntaxError, match=r"latitude 95.0 outside \[-90, 90\]") as e:
            parse_query("NEAR (95, 10)")
        assert offset_of(e) == len("NEAR (")

    def test_longitude_out_of_range(self):
        with pytest.raises(QuerySyntaxError, match=r"longitude 185.0 outside \[-180, 180\]") as e:
            parse_query("NEAR (10, 185)")
        assert offset_of(e) == len("NEAR (10, ")

    def test_point_missing_comma(self):
        with pytest.raises(QuerySyntaxError, match="expected ',' in point") as e:
            parse_query("NEAR (10 20)")
        assert offset_of(e) == len("NEAR (10 ")

    def test_point_bad_number(self):
        with pytest.raises(QuerySyntaxError, match="expected latitude") as e:
            parse_query("NEAR (a, 2)")
        assert offset_of(e) == len("NEAR (")

    def test_zero_radius(self):
        with pytest.raises(QuerySyntaxError, match="radius must be positive") as e:
            parse_query("NEAR x WITHIN 0 km")
        assert offset_of(e) == len("NEAR x WITHIN ")

    def test_negative_radius(self):
        with pytest.raises(QuerySyntaxError, match="radius must be positive"):
            parse_query("NEAR x WITHIN -2 km")

    def test_bad_unit(self):
        with pytest.raises(QuerySyntaxError, match="expected unit km or mi") as e:
            parse_query("NEAR x WITHIN 5 parsecs")
        assert offset_of(e) == len("NEAR x WITHIN 5 ")

    def test_missing_unit(self):
        with pytest.raises(QuerySyntaxError, match="expected unit km or mi") as e:
            parse_query("NEAR x WITHIN 5")
        assert offset_of(e) == len("NEAR x WITHIN 5")

    def test_stray_punctuation_in_terms(self):
        with pytest.raises(QuerySyntaxError, match="unexpected ','") as e:
            parse_query("a , b")
        assert offset_of(e) == 2

    def test_unexpected_leading_paren(self):
        with pytest.raises(QuerySyntaxError) as e:
            parse_query(") stray")
        assert offset_of(e) == 0


_TERM_WORDS = ["red", "fish", "blue", "inn", "quiet"]
_SPATIAL_ST = st.one_of(
    st.none(),
    st.just(InPlace("north port")),
    st.just(InPlace("arbor")),
    st.builds(
        NearPlace,
        st.sampled_from(["twin falls", "arbor"]),
        st.one_of(st.none(), st.integers(1, 4000).map(lambda n: n / 4.0)),
    ),
    st.builds(
        NearPoint,
        st.builds(
            GeoPoint,
            st.integers(-356, 356).map(lambda n: n / 4.0),
            st.integers(-716, 716).map(lambda n: n / 4.0),
        ),
        st.one_of(st.none(), st.integers(1, 4000).map(lambda n: n / 4.0)),
    ),
)


class TestUnparse:
    def test_examples(self):
        assert unparse(QueryAst(("a", "b"), InPlace("North Port"))) == "a b IN North Port"
        assert unparse(QueryAst((), NearPlace("x", 2.5))) == "NEAR x WITHIN 2.5 km"
        assert (
            unparse(QueryAst(("a",), NearPoint(GeoPoint(1.5, -2.5), None)))
            == "a NEAR (1.5, -2.5)"
        )

    @given(
        terms=st.lists(st.sampled_from(_TERM_WORDS), max_size=3),
        spatial=_SPATIAL_ST,
    )
    def test_round_trip(self, terms, spatial):
        ast = QueryAst(tuple(terms), spatial)
        if not ast.terms and ast.spatial is None:
            return  # nothing to print; the empty string does not parse
        assert parse_query(unparse(ast)) == ast


class TestResolveSpatial:
    def test_in_place_uses_padded_footprint(self, demo_engine):
        target = resolve_spatial(InPlace("Hyderabad"), demo_engine, demo_engine.config)
        assert target == InRegion(
            place_footprint(1, demo_engine.gazetteer, demo_engine.config.footprint_pad_deg)
        )

    def test_near_place_default_radius(self, demo_engine):
        target = resolve_spatial(NearPlace("Charminar", None), demo_engine, demo_engine.config)
        assert target == NearCenter(GeoPoint(17.3616, 78.4747), 10.0)

    def test_near_place_explicit_radius(self, demo_engine):
        target = resolve_spatial(NearPlace("Charminar", 3.5), demo_engine, demo_engine.config)
        assert target.radius_km == 3.5

    def test_near_point(self, demo_engine):
        clause = NearPoint(GeoPoint(1.0, 2.0), 7.0)
        assert resolve_spatial(clause, demo_engine, demo_engine.config) == NearCenter(
            GeoPoint(1.0, 2.0), 7.0
        )

    def test_unknown_place(self, demo_engine):
        with pytest.raises(UnknownPlace):
            resolve_spatial(InPlace("Atlantis"), demo_engine, demo_engine.config)


class TestRunOnDemo:
    def test_semantic_query(self, demo_engine):
        outcome = run(parse_query("lodging hotels IN Hyderabad"), demo_engine)
        assert [r.doc_id for r in outcome.results] == ["hyd-guesthouse-2", "hyd-lodging-1"]
        assert outcome.total_candidates == 2
        assert [r.combined for r in outcome.results] == [1.0, 0.5]
        assert all(r.spatial_score == 1.0 for r in outcome.results)

    def test_terms_are_folded(self, demo_engine):
        upper = run(parse_query("LODGING Hotels IN Hyderabad"), demo_engine)
        lower = run(parse_query("lodging hotels IN Hyderabad"), demo_engine)
        assert upper == lower

    def test_terms_only_query_scores_spatial_one(self, demo_engine):
        outcome = run(parse_query("hotel"), demo_engine)
        assert {r.doc_id for r in outcome.results} == {
            "hyd-lodging-1",
            "hyd-guesthouse-2",
            "hyd-catering-3",
            "mum-lodging-4",
        }
        assert all(r.spatial_score == 1.0 for r in outcome.results)

    def test_spatial_only_query(self, demo_engine):
        outcome = run(parse_query("IN Mumbai"), demo_engine)
        assert [r.doc_id for r in outcome.results] == ["mum-lodging-4"]
        assert outcome.results[0].text_score == 0.0
        assert outcome.results[0].combined == 1.0

    def test_near_point_with_radius(self, demo_engine):
        outcome = run(parse_query("NEAR (17.38, 78.47) WITHIN 25 km"), demo_engine)
        assert {r.doc_id for r in outcome.results} == {
            "hyd-lodging-1",
            "hyd-guesthouse-2",
            "hyd-catering-3",
        }

    def test_multi_token_concept_in_query(self, demo_engine):
        outcome = run(parse_query("guest house IN Hyderabad"), demo_engine)
        assert {r.doc_id for r in outcome.results} == {"hyd-lodging-1", "hyd-guesthouse-2"}

    def test_explicit_radius_narrows(self, demo_engine):
        outcome = run(parse_query("NEAR Charminar WITHIN 1.2 km"), demo_engine)
        assert [r.doc_id for r in outcome.results] == ["hyd-lodging-1"]

    def test_default_radius_comes_from_config(self, demo_engine):
        wide = run(parse_query("NEAR Charminar"), demo_engine)
        assert len(wide.results) == 3
        narrow_cfg = dataclasses.replace(demo_engine.config, default_radius_km=1.2)
        narrow = run(parse_query("NEAR Charminar"), demo_engine, narrow_cfg)
        assert [r.doc_id for r in narrow.results] == ["hyd-lodging-1"]

    def test_places_field_matches_annotations(self, demo_engine):
        outcome = run(parse_query("lodging hotels IN Hyderabad"), demo_engine)
        by_id = {r.doc_id: r.places for r in outcome.results}
        assert by_id == {"hyd-lodging-1": (1, 6), "hyd-guesthouse-2": (1,)}

    def test_empty_ast_raises(self, demo_engine):
        with pytest.raises(EmptyQuery):
            run(QueryAst((), None), demo_engine)

    def test_execute_returns_result_list(self, demo_engine):
        ast = parse_query("hotel IN Hyderabad")
        assert execute(ast, demo_engine) == list(run(ast, demo_engine).results)

    def test_unknown_place_propagates(self, demo_engine):
        with pytest.raises(UnknownPlace):
            execute(parse_query("hotel IN Atlantis"), demo_engine)

    def test_top_k_truncation_keeps_candidate_total(self, demo_engine):
        cfg = dataclasses.replace(demo_engine.config, top_k=1)
        outcome = run(parse_query("hotel"), demo_engine, cfg)
        assert len(outcome.results) == 1
        assert outcome.total_candidates == 4


# ---------------------------------------------------------------------------
# randomized equivalence against a from-scratch evaluation

_PLACES = [
    (1, "arbor", 10.0, 10.0, 500),
    (2, "breeze", -20.0, 40.0, 900),
    (3, "cinder", 35.0, -60.0, 100),
    (4, "dune", -5.0, -120.0, 0),
    (5, "ember", 55.0, 100.0, 2000),
    (6, "frost", 0.0, 0.0, 50),
]

_FILLERS = ["quiet", "sunny", "old", "market", "river", "stone"]
_CONCEPT_JSON = (
    '[{"id": "stay", "preferred": "stay", "synonyms": ["inn", "lodge"]},'
    ' {"id": "food", "preferred": "food", "synonyms": ["cafe"], "parent": "amenity"}]'
)


def _sweep_gazetteer():
    return Gazetteer(
        [
            GazetteerEntry(
                id=pid,
                name=name,
                alt_names=(),
                location=GeoPoint(lat, lon),
                feature_class="P",
                feature_code="PPL",
                parent_id=None,
                population=pop,
            )
            for pid, name, lat, lon, pop in _PLACES
        ]
    )


def _sweep_docs(rng):
    vocab = _FILLERS + ["stay", "inn", "lodge", "food", "cafe"] + [p[1] for p in _PLACES]
    docs = []
    for i in range(rng.randint(3, 8)):
        body = " ".join(rng.choice(vocab) for _ in range(rng.randint(2, 10)))
        title = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 2)))
        docs.append(Document(doc_id=f"d{i}", title=title, body=body, uri=f"urn:doc:d{i}"))
    return docs


def _sweep_ast(rng):
    terms = tuple(
        rng.choice(_FILLERS + ["stay", "inn", "cafe"]) for _ in range(rng.randint(0, 3))
    )
    kind = rng.randrange(4)
    place = rng.choice(_PLACES)[1]
    radius = rng.choice([None, 500.0, 1500.0, 4000.0])
    if kind == 0 and terms:
        return QueryAst(terms, None)
    if kind == 1:
        return QueryAst(terms, InPlace(place))
    if kind == 2:
        return QueryAst(terms, NearPlace(place, radius))
    point = GeoPoint(rng.uniform(-60.0, 60.0), rng.uniform(-150.0, 150.0))
    return QueryAst(terms, NearPoint(point, radius))


def _from_scratch(ast, gazetteer, docs, lexicon, cfg):
    """Evaluate the whole query without the engine, its indexes, or `run`.

    The leaf utilities (expansion, scoring, geometry predicates) each carry
    their own oracle tests; what is recomputed independently here is the
    composition: filtering order, score-term choice, normalization domain,
    and the final ordering.
    """
    ix = index_docs(docs)
    groups = expand_terms(tokenize(" ".join(ast.terms)), lexicon)
    token_sets = {
        d.doc_id: set(tokenize(d.title)) | set(tokenize(d.body)) for d in docs
    }
    candidates = {
        doc_id
        for doc_id, toks in token_sets.items()
        if all(any(t in toks for t in group) for group in groups)
    }
    footprints = {}
    for d in docs:
        ann = annotate(d, gazetteer)
        if ann.footprint is not None:
            footprints[d.doc_id] = ann.footprint
    target = None
    if isinstance(ast.spatial, InPlace):
        pid = resolve_place(ast.spatial.place, gazetteer).place_id
        target = InRegion(place_footprint(pid, gazetteer, cfg.footprint_pad_deg))
        candidates = {
            doc_id
            for doc_id in candidates
            if doc_id in footprints
            and geometry_intersects_region(footprints[doc_id], target.region)
        }
    elif isinstance(ast.spatial, (NearPlace, NearPoint)):
        if isinstance(ast.spatial, NearPlace):
            pid = resolve_place(ast.spatial.place, gazetteer).place_id
            center = gazetteer.entries[pid].location
        else:
            center = ast.spatial.point
        radius = ast.spatial.radius_km or cfg.default_radius_km
        target = NearCenter(center, radius)
        candidates = {
            doc_id
            for doc_id in candidates
            if doc_id in footprints
            and haversine_km(representative_point(footprints[doc_id]), center) <= radius
        }
    terms = sorted({t for group in groups for t in group})
    text = {doc_id: bm25_score(ix, terms, doc_id) for doc_id in candidates}
    spatial = {
        doc_id: 1.0 if target is None else spatial_score(footprints[doc_id], target)
        for doc_id in candidates
    }
    if not text:
        return [], 0
    lo, hi = min(text.values()), max(text.values())
    norm = {d: 1.0 if hi == lo else (v - lo) / (hi - lo) for d, v in text.items()}
    combined = {
        d: cfg.alpha * norm[d] + (1.0 - cfg.alpha) * spatial[d] for d in candidates
    }
    ordered = sorted(combined.items(), key=lambda kv: (-kv[1], kv[0]))[: cfg.top_k]
    return [(d, c, text[d], spatial[d]) for d, c in ordered], len(candidates)


class TestPipelineEquivalence:
    @pytest.mark.parametrize("seed", range(12))
    def test_matches_from_scratch_evaluation(self, seed):
        rng = random.Random(1000 + seed)
        gazetteer = _sweep_gazetteer()
        docs = _sweep_docs(rng)
        lexicon = load_lexicon(_CONCEPT_JSON) if rng.random() < 0.7 else EMPTY_LEXICON
        cfg = EngineConfig(
            alpha=rng.choice([0.0, 0.25, 0.5, 1.0]),
            top_k=rng.randint(1, 5),
            default_radius_km=rng.choice([400.0, 1200.0]),
        )
        engine = build_engine(gazetteer, docs, lexicon, config=cfg)
        for _ in range(10):
            ast = _sweep_ast(rng)
            outcome = run(ast, engine)
            got = [
                (r.doc_id, r.combined, r.text_score, r.spatial_score)
                for r in outcome.results
            ]
            expected, total = _from_scratch(ast, gazetteer, docs, lexicon, cfg)
            assert got == expected
            assert outcome.total_candidates == total
