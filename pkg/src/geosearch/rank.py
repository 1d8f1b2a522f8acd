"""Combine text and spatial relevance into one deterministic ordering."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import MismatchedDocSets
from .geo import BBox, GeoPoint, haversine_km
from .spatial import Geometry, geometry_bbox, representative_point


@dataclass(frozen=True)
class RankConfig:
    alpha: float = 0.5  # weight of the text component
    top_k: int = 10

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and 0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be at least 1, got {self.top_k}")


@dataclass(frozen=True)
class InRegion:
    """A resolved containment clause: the place footprint to match against."""

    region: BBox


@dataclass(frozen=True)
class NearCenter:
    """A resolved proximity clause: buffer center and radius in km."""

    center: GeoPoint
    radius_km: float


SpatialTarget = Union[InRegion, NearCenter]


def spatial_score(footprint: Geometry, target: SpatialTarget) -> float:
    """Score a document footprint against a resolved spatial clause, in [0, 1].

    Near: 1 - d/r, floored at zero. In: 1.0 when the footprint's
    representative point falls strictly inside the region, otherwise the
    fraction of the footprint's degree-area that overlaps the region (zero
    for zero-area footprints).
    """
    if isinstance(target, NearCenter):
        d = haversine_km(representative_point(footprint), target.center)
        if d == 0.0:
            return 1.0
        if target.radius_km <= 0.0:
            return 0.0
        return max(0.0, 1.0 - d / target.radius_km)
    rep = representative_point(footprint)
    region = target.region
    if (
        region.min_lat < rep.lat < region.max_lat
        and region.min_lon < rep.lon < region.max_lon
    ):
        return 1.0
    box = geometry_bbox(footprint)
    area = box.area_deg2
    if area == 0.0:
        return 0.0
    overlap_lat = min(box.max_lat, region.max_lat) - max(box.min_lat, region.min_lat)
    overlap_lon = min(box.max_lon, region.max_lon) - max(box.min_lon, region.min_lon)
    if overlap_lat <= 0.0 or overlap_lon <= 0.0:
        return 0.0
    return min(1.0, (overlap_lat * overlap_lon) / area)


def combine(
    text_scores: Mapping[str, float],
    spatial_scores: Mapping[str, float],
    config: RankConfig = RankConfig(),
) -> list[tuple[str, float]]:
    """Blend per-document scores and return the top_k (doc_id, combined) pairs.

    Text scores are min-max normalized within the candidate set (all equal
    normalizes to 1.0), then combined = alpha * text + (1 - alpha) * spatial.
    Ordering is by combined score descending with doc_id ascending on ties.
    """
    if set(text_scores) != set(spatial_scores):
        raise MismatchedDocSets(
            f"text and spatial candidates differ: {sorted(set(text_scores) ^ set(spatial_scores))!r}"
        )
    if not text_scores:
        return []
    lo = min(text_scores.values())
    hi = max(text_scores.values())
    if hi == lo:
        normalized = {doc_id: 1.0 for doc_id in text_scores}
    else:
        normalized = {doc_id: (s - lo) / (hi - lo) for doc_id, s in text_scores.items()}
    combined = {
        doc_id: config.alpha * normalized[doc_id] + (1.0 - config.alpha) * spatial_scores[doc_id]
        for doc_id in text_scores
    }
    ordered = sorted(combined.items(), key=lambda kv: (-kv[1], kv[0]))
    return ordered[: config.top_k]
