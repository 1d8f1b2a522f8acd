"""Scoring and ordering rules for the combined text and spatial ranker."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geosearch.errors import MismatchedDocSets
from geosearch.geo import BBox, GeoPoint, Polygon, haversine_km
from geosearch.rank import InRegion, NearCenter, RankConfig, combine, spatial_score


class TestRankConfig:
    @pytest.mark.parametrize("alpha", [-0.1, 1.1, float("nan"), float("inf")])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValueError):
            RankConfig(alpha=alpha)

    def test_top_k_positive(self):
        with pytest.raises(ValueError):
            RankConfig(top_k=0)

    def test_bounds_allowed(self):
        assert RankConfig(alpha=0.0).alpha == 0.0
        assert RankConfig(alpha=1.0).alpha == 1.0


class TestNearScore:
    def test_at_center(self):
        target = NearCenter(GeoPoint(10.0, 20.0), 5.0)
        assert spatial_score(GeoPoint(10.0, 20.0), target) == 1.0

    def test_at_center_with_zero_radius(self):
        target = NearCenter(GeoPoint(10.0, 20.0), 0.0)
        assert spatial_score(GeoPoint(10.0, 20.0), target) == 1.0

    def test_halfway_scores_half(self):
        center = GeoPoint(0.0, 0.0)
        spot = GeoPoint(0.0, 0.5)
        d = haversine_km(spot, center)
        assert spatial_score(spot, NearCenter(center, 2.0 * d)) == 0.5

    def test_at_and_beyond_radius(self):
        center = GeoPoint(0.0, 0.0)
        spot = GeoPoint(0.0, 1.0)
        d = haversine_km(spot, center)
        assert spatial_score(spot, NearCenter(center, d)) == 0.0
        assert spatial_score(spot, NearCenter(center, d / 2.0)) == 0.0

    def test_zero_radius_away_from_center(self):
        assert spatial_score(GeoPoint(1.0, 1.0), NearCenter(GeoPoint(0.0, 0.0), 0.0)) == 0.0

    def test_bbox_footprint_uses_its_center(self):
        box = BBox(0.0, 0.0, 2.0, 2.0)
        center = GeoPoint(1.0, 1.0)
        assert spatial_score(box, NearCenter(center, 10.0)) == 1.0

    def test_scores_decrease_with_distance(self):
        center = GeoPoint(0.0, 0.0)
        target = NearCenter(center, 500.0)
        scores = [
            spatial_score(GeoPoint(0.0, lon), target) for lon in (0.5, 1.0, 2.0, 4.0)
        ]
        assert scores == sorted(scores, reverse=True)
        assert all(0.0 <= s <= 1.0 for s in scores)


class TestInScore:
    def test_strict_interior_point(self):
        region = InRegion(BBox(0.0, 0.0, 10.0, 10.0))
        assert spatial_score(GeoPoint(5.0, 5.0), region) == 1.0

    def test_point_on_boundary_scores_zero(self):
        # a point footprint has no area to overlap with
        region = InRegion(BBox(0.0, 0.0, 10.0, 10.0))
        assert spatial_score(GeoPoint(0.0, 5.0), region) == 0.0

    def test_point_outside(self):
        region = InRegion(BBox(0.0, 0.0, 10.0, 10.0))
        assert spatial_score(GeoPoint(20.0, 5.0), region) == 0.0

    def test_half_overlap_scores_half(self):
        footprint = BBox(0.0, 0.0, 1.0, 1.0)
        region = InRegion(BBox(0.5, 0.0, 1.5, 1.0))
        assert spatial_score(footprint, region) == 0.5

    def test_quarter_overlap(self):
        footprint = BBox(0.0, 0.0, 2.0, 2.0)
        region = InRegion(BBox(1.0, 1.0, 5.0, 5.0))
        assert spatial_score(footprint, region) == 0.25

    def test_rep_point_outside_with_overlap(self):
        footprint = BBox(0.0, 0.0, 4.0, 4.0)
        region = InRegion(BBox(3.0, 0.0, 10.0, 4.0))
        assert spatial_score(footprint, region) == 0.25

    def test_footprint_inside_region(self):
        footprint = BBox(2.0, 2.0, 3.0, 3.0)
        region = InRegion(BBox(0.0, 0.0, 10.0, 10.0))
        assert spatial_score(footprint, region) == 1.0

    def test_disjoint_and_touching(self):
        region = InRegion(BBox(0.0, 0.0, 1.0, 1.0))
        assert spatial_score(BBox(5.0, 5.0, 6.0, 6.0), region) == 0.0
        assert spatial_score(BBox(1.0, 0.0, 2.0, 1.0), region) == 0.0

    def test_polygon_footprint_uses_centroid(self):
        tri = Polygon((GeoPoint(0.0, 0.0), GeoPoint(6.0, 0.0), GeoPoint(0.0, 6.0)))
        region = InRegion(BBox(1.0, 1.0, 3.0, 3.0))
        # centroid (2, 2) sits strictly inside
        assert spatial_score(tri, region) == 1.0


class TestCombine:
    def test_mismatched_doc_sets(self):
        with pytest.raises(MismatchedDocSets, match="'b'"):
            combine({"a": 1.0}, {"a": 1.0, "b": 0.5})

    def test_empty(self):
        assert combine({}, {}) == []

    def test_min_max_normalization(self):
        text = {"a": 2.0, "b": 4.0, "c": 6.0}
        spatial = {"a": 0.0, "b": 0.0, "c": 0.0}
        ranked = combine(text, spatial, RankConfig(alpha=0.5, top_k=10))
        assert ranked == [("c", 0.5), ("b", 0.25), ("a", 0.0)]

    def test_all_equal_text_normalizes_to_one(self):
        text = {"a": 3.0, "b": 3.0}
        spatial = {"a": 0.5, "b": 1.0}
        ranked = combine(text, spatial, RankConfig(alpha=0.5, top_k=10))
        assert ranked == [("b", 1.0), ("a", 0.75)]

    def test_tie_breaks_by_doc_id(self):
        text = {"z": 1.0, "a": 1.0, "m": 1.0}
        spatial = {"z": 0.5, "a": 0.5, "m": 0.5}
        ranked = combine(text, spatial)
        assert [doc_id for doc_id, _ in ranked] == ["a", "m", "z"]

    def test_truncates_to_top_k(self):
        text = {f"d{i}": float(i) for i in range(6)}
        spatial = {f"d{i}": 0.0 for i in range(6)}
        ranked = combine(text, spatial, RankConfig(alpha=1.0, top_k=2))
        assert [doc_id for doc_id, _ in ranked] == ["d5", "d4"]

    def test_alpha_one_is_pure_text(self):
        text = {"a": 1.0, "b": 5.0}
        spatial = {"a": 1.0, "b": 0.0}
        ranked = combine(text, spatial, RankConfig(alpha=1.0, top_k=10))
        assert ranked == [("b", 1.0), ("a", 0.0)]

    def test_alpha_zero_is_pure_spatial(self):
        text = {"a": 1.0, "b": 5.0}
        spatial = {"a": 1.0, "b": 0.0}
        ranked = combine(text, spatial, RankConfig(alpha=0.0, top_k=10))
        assert ranked == [("a", 1.0), ("b", 0.0)]

    def test_combined_scores_stay_in_unit_range(self):
        text = {"a": -7.0, "b": 0.0, "c": 123.0}
        spatial = {"a": 1.0, "b": 0.3, "c": 0.0}
        for alpha in (0.0, 0.25, 0.5, 1.0):
            for _, score in combine(text, spatial, RankConfig(alpha=alpha, top_k=10)):
                assert 0.0 <= score <= 1.0


# scores on a dyadic grid make the affine transform bit-exact, so ordering
# comparisons cannot be disturbed by rounding
_dyadic = st.integers(-256, 256).map(lambda n: n / 4.0)
_doc_ids = st.lists(
    st.sampled_from([f"d{i}" for i in range(8)]), min_size=1, max_size=8, unique=True
)


@st.composite
def _score_table(draw):
    ids = draw(_doc_ids)
    text = {i: draw(_dyadic) for i in ids}
    spatial = {i: draw(st.integers(0, 64).map(lambda n: n / 64.0)) for i in ids}
    return text, spatial


class TestCombineProperties:
    @given(
        table=_score_table(),
        scale=st.integers(1, 256).map(lambda n: n / 4.0),
        shift=_dyadic,
        alpha=st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]),
    )
    def test_order_invariant_under_positive_affine_rescaling(self, table, scale, shift, alpha):
        text, spatial = table
        config = RankConfig(alpha=alpha, top_k=8)
        base = combine(text, spatial, config)
        rescaled_text = {k: scale * v + shift for k, v in text.items()}
        rescaled = combine(rescaled_text, spatial, config)
        assert [doc_id for doc_id, _ in rescaled] == [doc_id for doc_id, _ in base]

    @given(table=_score_table(), bump=st.integers(1, 64).map(lambda n: n / 64.0))
    def test_raising_spatial_score_never_demotes(self, table, bump):
        text, spatial = table
        target = sorted(text)[0]
        config = RankConfig(alpha=0.5, top_k=8)
        before = [doc_id for doc_id, _ in combine(text, spatial, config)]
        raised = dict(spatial)
        raised[target] = min(1.0, raised[target] + bump)
        after = [doc_id for doc_id, _ in combine(text, raised, config)]
        assert after.index(target) <= before.index(target)

    @given(table=_score_table())
    def test_deterministic(self, table):
        text, spatial = table
        assert combine(text, spatial) == combine(dict(text), dict(spatial))
