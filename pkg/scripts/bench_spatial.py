#!/usr/bin/env python3
"""Compare tree-pruned spatial queries against a linear scan.

Generates a uniform random point set, runs point and buffer queries
through the packed tree, and reports visited-node counts next to the
brute-force cost. Run with --points/--queries to change the sizes.
"""

import argparse
import math
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from geosearch.geo import GeoPoint, haversine_km  # noqa: E402
from geosearch.spatial import LEAF_CAPACITY, QueryStats, SpatialIndex  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--queries", type=int, default=200)
    ap.add_argument("--radius-km", type=float, default=50.0)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    items = [
        (i, GeoPoint(rng.uniform(-60, 60), rng.uniform(-179, 179)))
        for i in range(args.points)
    ]
    t0 = time.perf_counter()
    index = SpatialIndex.build(items)
    build_s = time.perf_counter() - t0
    print(f"indexed {len(index)} points in {build_s:.3f}s (leaf capacity {LEAF_CAPACITY})")

    centers = [GeoPoint(rng.uniform(-60, 60), rng.uniform(-179, 179)) for _ in range(args.queries)]

    visited = []
    t0 = time.perf_counter()
    tree_hits = 0
    for center in centers:
        stats = QueryStats()
        tree_hits += len(index.query_buffer(center, args.radius_km, stats))
        visited.append(stats.nodes_visited)
    tree_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    scan_hits = 0
    for center in centers:
        scan_hits += sum(
            1 for _, p in items if haversine_km(p, center) <= args.radius_km
        )
    scan_s = time.perf_counter() - t0

    assert tree_hits == scan_hits, "tree and scan disagree"
    log_bound = 8 * math.log2(len(items))
    print(f"buffer radius {args.radius_km:g} km, {args.queries} queries, {tree_hits} total hits")
    print(f"  tree: {tree_s:.3f}s, nodes visited avg {sum(visited)/len(visited):.1f} "
          f"max {max(visited)} (8*log2(n) = {log_bound:.1f})")
    print(f"  scan: {scan_s:.3f}s over {args.points} points per query")


if __name__ == "__main__":
    main()
