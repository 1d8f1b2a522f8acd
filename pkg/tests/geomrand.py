"""Seeded random geometry generators and the linear-scan oracles that index
results are compared against."""

import math

from geosearch.geo import BBox, GeoPoint, Polygon, haversine_km
from geosearch.spatial import (
    geometry_contains_point,
    geometry_intersects_region,
    representative_point,
)

LAT_RANGE = (-84.0, 84.0)
LON_RANGE = (-179.0, 179.0)


def random_point(rng, lat_range=LAT_RANGE, lon_range=LON_RANGE):
    return GeoPoint(rng.uniform(*lat_range), rng.uniform(*lon_range))


def random_bbox(rng, max_span=8.0):
    lat = rng.uniform(LAT_RANGE[0], LAT_RANGE[1] - max_span)
    lon = rng.uniform(LON_RANGE[0], LON_RANGE[1] - max_span)
    return BBox(
        lat,
        lon,
        lat + rng.uniform(0.01, max_span),
        lon + rng.uniform(0.01, max_span),
    )


def random_polygon(rng, max_radius=4.0):
    """Convex ring sampled on a random ellipse; redraws a collapsing draw."""
    center = random_point(
        rng,
        (LAT_RANGE[0] + max_radius, LAT_RANGE[1] - max_radius),
        (LON_RANGE[0] + max_radius, LON_RANGE[1] - max_radius),
    )
    r_lat = rng.uniform(0.05, max_radius)
    r_lon = rng.uniform(0.05, max_radius)
    while True:
        k = rng.randint(3, 8)
        angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(k))
        ring = [
            GeoPoint(center.lat + r_lat * math.sin(a), center.lon + r_lon * math.cos(a))
            for a in angles
        ]
        if all(ring[i] != ring[(i + 1) % len(ring)] for i in range(len(ring))):
            return Polygon(tuple(ring))


def random_geometry(rng):
    kind = rng.randrange(3)
    if kind == 0:
        return random_point(rng)
    if kind == 1:
        return random_bbox(rng)
    return random_polygon(rng)


def random_items(rng, n):
    return [(i, random_geometry(rng)) for i in range(n)]


def probe_near_items(rng, items):
    """A probe point that often lands on or inside a stored geometry."""
    if items and rng.random() < 0.5:
        geom = rng.choice(items)[1]
        if isinstance(geom, GeoPoint):
            return geom
        if isinstance(geom, BBox):
            return geom.center
        return rng.choice(geom.ring)
    return random_point(rng)


def scan_point(items, p):
    return {i for i, g in items if geometry_contains_point(g, p)}


def scan_region(items, region):
    return {i for i, g in items if geometry_intersects_region(g, region)}


def scan_buffer(items, center, radius_km):
    out = {}
    for i, g in items:
        d = haversine_km(representative_point(g), center)
        if d <= radius_km:
            out[i] = d
    return out
