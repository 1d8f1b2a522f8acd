"""Packed R-tree over point, box, and polygon items.

The tree is bulk loaded once with sort-tile-recursive packing (leaf capacity
16, uniform height) and never mutated. Queries prune with bounding boxes and
confirm with exact geometry predicates, so results match a linear scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Union

from .errors import DuplicateId
from .geo import (
    BBox,
    GeoPoint,
    Polygon,
    bbox_intersects,
    bbox_of_points,
    haversine_km,
    point_in_polygon,
    _on_segment,
)

Geometry = Union[GeoPoint, BBox, Polygon]
ItemId = Hashable

LEAF_CAPACITY = 16

# Degenerate point bboxes are padded by the point-equality tolerance so a
# probe within tolerance still reaches the right leaf.
POINT_MATCH_TOL = 1e-9

# Conservative km-per-degree-latitude figure used for buffer pruning pads.
KM_PER_DEG_LAT = 110.574


@dataclass
class QueryStats:
    """Optional per-query diagnostics; counts nodes entered during traversal."""

    nodes_visited: int = 0


def geometry_bbox(geom: Geometry) -> BBox:
    """Exact bounds of a geometry, without any pruning pad."""
    if isinstance(geom, GeoPoint):
        return BBox(geom.lat, geom.lon, geom.lat, geom.lon)
    if isinstance(geom, BBox):
        return geom
    return bbox_of_points(geom.ring)


def representative_point(geom: Geometry) -> GeoPoint:
    """The point itself, a box center, or a polygon centroid."""
    if isinstance(geom, GeoPoint):
        return geom
    if isinstance(geom, BBox):
        return geom.center
    return _polygon_centroid(geom)


def _polygon_centroid(poly: Polygon) -> GeoPoint:
    area2 = 0.0
    cx = 0.0
    cy = 0.0
    for a, b in poly.edges():
        cross = a.lon * b.lat - b.lon * a.lat
        area2 += cross
        cx += (a.lon + b.lon) * cross
        cy += (a.lat + b.lat) * cross
    if abs(area2) < 1e-12:  # collinear ring: fall back to the vertex mean
        lat = sum(p.lat for p in poly.ring) / len(poly.ring)
        lon = sum(p.lon for p in poly.ring) / len(poly.ring)
        return GeoPoint(lat, lon)
    return GeoPoint(cy / (3.0 * area2), cx / (3.0 * area2))


def _item_bbox(geom: Geometry) -> BBox:
    if isinstance(geom, GeoPoint):
        return BBox(
            geom.lat - POINT_MATCH_TOL,
            geom.lon - POINT_MATCH_TOL,
            geom.lat + POINT_MATCH_TOL,
            geom.lon + POINT_MATCH_TOL,
        )
    return geometry_bbox(geom)


# ---------------------------------------------------------------------------
# exact geometry predicates

def geometry_contains_point(geom: Geometry, p: GeoPoint) -> bool:
    """Containment used by point queries; stored points match within 1e-9 deg."""
    if isinstance(geom, GeoPoint):
        return abs(geom.lat - p.lat) <= POINT_MATCH_TOL and abs(geom.lon - p.lon) <= POINT_MATCH_TOL
    if isinstance(geom, BBox):
        return geom.contains(p)
    return point_in_polygon(p, geom)


def _segments_intersect(a1: GeoPoint, a2: GeoPoint, b1: GeoPoint, b2: GeoPoint) -> bool:
    def orient(o: GeoPoint, a: GeoPoint, b: GeoPoint) -> float:
        return (a.lat - o.lat) * (b.lon - o.lon) - (a.lon - o.lon) * (b.lat - o.lat)

    d1 = orient(b1, b2, a1)
    d2 = orient(b1, b2, a2)
    d3 = orient(a1, a2, b1)
    d4 = orient(a1, a2, b2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    # collinear or touching cases
    return (
        (d1 == 0 and _on_segment(a1, b1, b2))
        or (d2 == 0 and _on_segment(a2, b1, b2))
        or (d3 == 0 and _on_segment(b1, a1, a2))
        or (d4 == 0 and _on_segment(b2, a1, a2))
    )


def _bbox_corners(box: BBox) -> tuple[GeoPoint, ...]:
    return (
        GeoPoint(box.min_lat, box.min_lon),
        GeoPoint(box.min_lat, box.max_lon),
        GeoPoint(box.max_lat, box.max_lon),
        GeoPoint(box.max_lat, box.min_lon),
    )


def _bbox_edges(box: BBox) -> list[tuple[GeoPoint, GeoPoint]]:
    c = _bbox_corners(box)
    return [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]


def polygon_intersects_bbox(poly: Polygon, box: BBox) -> bool:
    if any(box.contains(v) for v in poly.ring):
        return True
    if any(point_in_polygon(c, poly) for c in _bbox_corners(box)):
        return True
    box_edges = _bbox_edges(box)
    return any(
        _segments_intersect(a, b, c, d) for a, b in poly.edges() for c, d in box_edges
    )


def polygons_intersect(pa: Polygon, pb: Polygon) -> bool:
    if any(point_in_polygon(v, pb) for v in pa.ring):
        return True
    if any(point_in_polygon(v, pa) for v in pb.ring):
        return True
    return any(
        _segments_intersect(a, b, c, d) for a, b in pa.edges() for c, d in pb.edges()
    )


def geometry_intersects_region(geom: Geometry, region: BBox | Polygon) -> bool:
    """Closed intersection semantics: touching boundaries intersect."""
    if isinstance(region, BBox):
        if isinstance(geom, GeoPoint):
            return region.contains(geom)
        if isinstance(geom, BBox):
            return bbox_intersects(geom, region)
        return polygon_intersects_bbox(geom, region)
    if isinstance(geom, GeoPoint):
        return point_in_polygon(geom, region)
    if isinstance(geom, BBox):
        return polygon_intersects_bbox(region, geom)
    return polygons_intersect(geom, region)


# ---------------------------------------------------------------------------
# the tree

@dataclass
class _Node:
    box: BBox
    children: list["_Node"] = field(default_factory=list)
    entries: list[tuple[ItemId, Geometry]] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


def _merge_boxes(boxes: list[BBox]) -> BBox:
    return BBox(
        min(b.min_lat for b in boxes),
        min(b.min_lon for b in boxes),
        max(b.max_lat for b in boxes),
        max(b.max_lon for b in boxes),
    )


def _str_tile(records: list[tuple[BBox, object]], cap: int) -> list[list[tuple[BBox, object]]]:
    """Sort-tile-recursive grouping of (bbox, payload) records into runs of cap."""
    n = len(records)
    pages = math.ceil(n / cap)
    slices = math.ceil(math.sqrt(pages))
    slice_size = cap * math.ceil(pages / slices)
    ordered = sorted(
        records,
        key=lambda r: ((r[0].min_lon + r[0].max_lon) / 2.0, (r[0].min_lat + r[0].max_lat) / 2.0),
    )
    groups = []
    for start in range(0, n, slice_size):
        chunk = sorted(
            ordered[start : start + slice_size],
            key=lambda r: ((r[0].min_lat + r[0].max_lat) / 2.0, (r[0].min_lon + r[0].max_lon) / 2.0),
        )
        for leaf_start in range(0, len(chunk), cap):
            groups.append(chunk[leaf_start : leaf_start + cap])
    return groups


class SpatialIndex:
    """Bulk-loaded, read-only R-tree; see `SpatialIndex.build`."""

    def __init__(self, root: _Node | None, size: int):
        self._root = root
        self._size = size

    def __len__(self) -> int:
        return self._size

    @classmethod
    def build(cls, items: Iterable[tuple[ItemId, Geometry]]) -> "SpatialIndex":
        """Pack items into an STR tree; duplicate ids are rejected."""
        records: list[tuple[BBox, tuple[ItemId, Geometry]]] = []
        seen: set[ItemId] = set()
        for item_id, geom in items:
            if item_id in seen:
                raise DuplicateId(f"duplicate spatial item id {item_id!r}")
            seen.add(item_id)
            records.append((_item_bbox(geom), (item_id, geom)))
        if not records:
            return cls(None, 0)
        # deterministic regardless of input order
        records.sort(key=lambda r: repr(r[1][0]))
        nodes = [
            _Node(box=_merge_boxes([b for b, _ in group]), entries=[payload for _, payload in group])
            for group in _str_tile(records, LEAF_CAPACITY)
        ]
        while len(nodes) > 1:
            upper = _str_tile([(n.box, n) for n in nodes], LEAF_CAPACITY)
            nodes = [
                _Node(box=_merge_boxes([b for b, _ in group]), children=[n for _, n in group])
                for group in upper
            ]
        return cls(nodes[0], len(records))

    def _walk(self, node: _Node, prune, emit, stats: QueryStats | None) -> None:
        if stats is not None:
            stats.nodes_visited += 1
        if node.is_leaf:
            for item_id, geom in node.entries:
                emit(item_id, geom)
        else:
            for child in node.children:
                if prune(child.box):
                    self._walk(child, prune, emit, stats)

    def query_point(self, p: GeoPoint, stats: QueryStats | None = None) -> set[ItemId]:
        """Ids of items containing `p` (stored points match within 1e-9 deg)."""
        out: set[ItemId] = set()
        if self._root is None:
            return out

        def prune(box: BBox) -> bool:
            return box.contains(p)

        def emit(item_id: ItemId, geom: Geometry) -> None:
            if geometry_contains_point(geom, p):
                out.add(item_id)

        if prune(self._root.box):
            self._walk(self._root, prune, emit, stats)
        return out

    def query_region(self, region: BBox | Polygon, stats: QueryStats | None = None) -> set[ItemId]:
        """Ids of items whose geometry intersects the region (closed semantics)."""
        out: set[ItemId] = set()
        if self._root is None:
            return out
        region_box = region if isinstance(region, BBox) else geometry_bbox(region)

        def prune(box: BBox) -> bool:
            return bbox_intersects(box, region_box)

        def emit(item_id: ItemId, geom: Geometry) -> None:
            if geometry_intersects_region(geom, region):
                out.add(item_id)

        if prune(self._root.box):
            self._walk(self._root, prune, emit, stats)
        return out

    def query_buffer(
        self, center: GeoPoint, radius_km: float, stats: QueryStats | None = None
    ) -> dict[ItemId, float]:
        """Items whose representative point lies within `radius_km` of `center`.

        Returns id -> great-circle distance in km. Pruning uses a degree box
        that provably covers the spherical cap (the longitude pad is evaluated
        at the band's extreme latitude, with a full sweep once the band
        reaches a pole); the exact haversine test runs on every candidate.
        """
        if radius_km < 0:
            raise ValueError(f"radius must be non-negative, got {radius_km}")
        out: dict[ItemId, float] = {}
        if self._root is None:
            return out
        boxes = _buffer_search_boxes(center, radius_km)

        def prune(box: BBox) -> bool:
            return any(bbox_intersects(box, search) for search in boxes)

        def emit(item_id: ItemId, geom: Geometry) -> None:
            if item_id in out:
                return
            d = haversine_km(representative_point(geom), center)
            if d <= radius_km:
                out[item_id] = d

        if prune(self._root.box):
            self._walk(self._root, prune, emit, stats)
        return out


def _buffer_search_boxes(center: GeoPoint, radius_km: float) -> list[BBox]:
    pad_deg = radius_km / KM_PER_DEG_LAT
    lat_lo = center.lat - pad_deg
    lat_hi = center.lat + pad_deg
    if lat_hi >= 90.0 or lat_lo <= -90.0:
        # the cap reaches a pole, where every longitude is nearby
        return [BBox(max(-90.0, lat_lo), -180.0, min(90.0, lat_hi), 180.0)]
    # a great-circle arc confined to the lat band spreads at most
    # pad/cos(extreme latitude) degrees of longitude
    band_lat = abs(center.lat) + pad_deg
    dlon = pad_deg / math.cos(math.radians(band_lat))
    if dlon >= 180.0:
        return [BBox(lat_lo, -180.0, lat_hi, 180.0)]
    lon_lo = center.lon - dlon
    lon_hi = center.lon + dlon
    boxes = [BBox(lat_lo, max(-180.0, lon_lo), lat_hi, min(180.0, lon_hi))]
    if lon_lo < -180.0:  # wrap past the antimeridian
        boxes.append(BBox(lat_lo, lon_lo + 360.0, lat_hi, 180.0))
    if lon_hi > 180.0:
        boxes.append(BBox(lat_lo, -180.0, lat_hi, lon_hi - 360.0))
    return boxes
