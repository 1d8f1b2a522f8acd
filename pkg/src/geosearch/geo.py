"""Geometry primitives, great-circle distance, and routing over a place network.

Containment and intersection predicates treat latitude/longitude as plain
planar coordinates; distances are great-circle kilometres on a sphere of
mean radius. Geometries that cross the antimeridian are out of scope.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Union

from .errors import NoPath, ParseError, UnknownNode

EARTH_RADIUS_KM = 6371.0  # mean Earth radius; quarter circle = 10007.54 km

NodeId = Union[int, str]


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 coordinate pair in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError(f"coordinates must be finite, got ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned degree rectangle; min bounds never exceed max bounds."""

    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    def __post_init__(self):
        for v in (self.min_lat, self.min_lon, self.max_lat, self.max_lon):
            if not math.isfinite(v):
                raise ValueError("bbox bounds must be finite")
        if self.min_lat > self.max_lat or self.min_lon > self.max_lon:
            raise ValueError("bbox min bound exceeds max bound")

    def contains(self, p: GeoPoint) -> bool:
        """Closed containment: boundary points are inside."""
        return (
            self.min_lat <= p.lat <= self.max_lat
            and self.min_lon <= p.lon <= self.max_lon
        )

    @property
    def center(self) -> GeoPoint:
        lat = (self.min_lat + self.max_lat) / 2.0
        lon = (self.min_lon + self.max_lon) / 2.0
        # interim boxes may be padded past the world bounds
        return GeoPoint(min(90.0, max(-90.0, lat)), min(180.0, max(-180.0, lon)))

    @property
    def area_deg2(self) -> float:
        return (self.max_lat - self.min_lat) * (self.max_lon - self.min_lon)


@dataclass(frozen=True)
class Polygon:
    """A simple ring, implicitly closed; do not repeat the first vertex."""

    ring: tuple[GeoPoint, ...]

    def __post_init__(self):
        ring = tuple(self.ring)
        object.__setattr__(self, "ring", ring)
        if len(ring) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for a, b in zip(ring, ring[1:] + ring[:1]):
            if a == b:
                raise ValueError("consecutive polygon vertices must differ")

    def edges(self) -> Iterable[tuple[GeoPoint, GeoPoint]]:
        ring = self.ring
        for i in range(len(ring)):
            yield ring[i], ring[(i + 1) % len(ring)]


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in kilometres on the mean-radius sphere."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    # rounding can push h a hair past 1 for near-antipodal pairs
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def point_in_polygon(p: GeoPoint, poly: Polygon) -> bool:
    """Even-odd ray casting in the lat/lon plane; boundary points count as inside."""
    for a, b in poly.edges():
        if _on_segment(p, a, b):
            return True
    inside = False
    for a, b in poly.edges():
        if (a.lat > p.lat) != (b.lat > p.lat):
            lon_cross = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat)
            if p.lon < lon_cross:
                inside = not inside
    return inside


def _on_segment(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> bool:
    cross = (b.lat - a.lat) * (p.lon - a.lon) - (b.lon - a.lon) * (p.lat - a.lat)
    if cross != 0.0:
        return False
    return (
        min(a.lat, b.lat) <= p.lat <= max(a.lat, b.lat)
        and min(a.lon, b.lon) <= p.lon <= max(a.lon, b.lon)
    )


def bbox_intersects(a: BBox, b: BBox) -> bool:
    """Closed-set test: boxes sharing only an edge or a corner still intersect."""
    return (
        a.min_lat <= b.max_lat
        and b.min_lat <= a.max_lat
        and a.min_lon <= b.max_lon
        and b.min_lon <= a.max_lon
    )


def bbox_of_points(points: Iterable[GeoPoint]) -> BBox:
    pts = list(points)
    if not pts:
        raise ValueError("bbox of no points")
    return BBox(
        min(p.lat for p in pts),
        min(p.lon for p in pts),
        max(p.lat for p in pts),
        max(p.lon for p in pts),
    )


class PathNetwork:
    """An undirected routing graph with strictly positive edge costs in km.

    Node coordinates come from the gazetteer; the network itself only stores
    ids, positions and adjacency.
    """

    def __init__(self, coords: Mapping[NodeId, GeoPoint], edges: Iterable[tuple[NodeId, NodeId, float]]):
        adjacency: dict[NodeId, list[tuple[NodeId, float]]] = {}
        nodes: dict[NodeId, GeoPoint] = {}
        for u, v, cost in edges:
            if not (math.isfinite(cost) and cost > 0):
                raise ValueError(f"edge cost must be positive, got {cost!r}")
            for node in (u, v):
                if node not in coords:
                    raise UnknownNode(f"edge endpoint {node!r} has no coordinates")
                nodes[node] = coords[node]
            adjacency.setdefault(u, []).append((v, cost))
            adjacency.setdefault(v, []).append((u, cost))
        for node in adjacency:
            adjacency[node].sort()
        self.nodes = nodes
        self.adjacency = adjacency

    def __contains__(self, node: NodeId) -> bool:
        return node in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)


def shortest_path(net: PathNetwork, src: NodeId, dst: NodeId) -> tuple[list[NodeId], float]:
    """Least-cost route from `src` to `dst` with a deterministic tie-break.

    Among routes of equal cost the lexicographically smallest node-id
    sequence wins, which the heap provides for free by ordering entries as
    (cost, path).
    """
    if src not in net.nodes:
        raise UnknownNode(f"unknown node {src!r}")
    if dst not in net.nodes:
        raise UnknownNode(f"unknown node {dst!r}")
    settled: set[NodeId] = set()
    heap: list[tuple[float, tuple[NodeId, ...]]] = [(0.0, (src,))]
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == dst:
            return list(path), cost
        for neighbor, edge_cost in net.adjacency.get(node, ()):
            if neighbor not in settled:
                heapq.heappush(heap, (cost + edge_cost, path + (neighbor,)))
    raise NoPath(f"no path from {src!r} to {dst!r}")


def load_edge_file(stream: IO[str] | Iterable[str], coords: Mapping[NodeId, GeoPoint]) -> PathNetwork:
    """Read `node_id<TAB>node_id<TAB>cost_km` lines into a PathNetwork.

    Node ids are integers resolved against `coords` (normally gazetteer
    locations); blank lines are skipped.
    """
    edges: list[tuple[NodeId, NodeId, float]] = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"expected 3 tab-separated columns, got {len(cols)}", lineno)
        try:
            u = int(cols[0])
            v = int(cols[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {cols[0]!r}/{cols[1]!r}", lineno) from None
        try:
            cost = float(cols[2])
        except ValueError:
            raise ParseError(f"non-numeric edge cost {cols[2]!r}", lineno) from None
        if not (math.isfinite(cost) and cost > 0):
            raise ParseError(f"edge cost must be positive, got {cols[2]!r}", lineno)
        for node in (u, v):
            if node not in coords:
                raise UnknownNode(f"line {lineno}: node {node} is not in the gazetteer")
        edges.append((u, v, cost))
    return PathNetwork(coords, edges)
