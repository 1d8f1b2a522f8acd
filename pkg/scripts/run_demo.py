#!/usr/bin/env python3
"""Build a snapshot from data/demo and walk through the core features.

Shows the effect of concept expansion on a city-scoped query, a buffer
query around a point, routing, and the RDF view of one entry.
"""

import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from geosearch.expand import EMPTY_LEXICON  # noqa: E402
from geosearch.service import place_ntriples, route_record, search_response  # noqa: E402
from geosearch.snapshot import build_snapshot, load_snapshot  # noqa: E402

DEMO = ROOT / "data" / "demo"


def show(engine, q, note):
    print(f"\n$ geosearch search '{q}'   # {note}")
    response = search_response(engine, q)
    for rank, r in enumerate(response["results"], 1):
        print(f"  {rank}. {r['score']:.4f}  {r['doc_id']:18s} {r['title']}")
    if not response["results"]:
        print("  (no results)")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        report = build_snapshot(
            tmp,
            gazetteer_path=DEMO / "gazetteer.tsv",
            corpus_path=DEMO / "corpus.jsonl",
            lexicon_path=DEMO / "lexicon.json",
            network_path=DEMO / "network.tsv",
        )
        print("built snapshot:")
        for line in report.lines():
            print(f"  {line}")

        engine = load_snapshot(tmp)
        show(engine, "lodging hotels IN Hyderabad", "concept expansion on")

        engine.lexicon = EMPTY_LEXICON
        show(engine, "lodging hotels IN Hyderabad", "expansion off: exact words only")
        engine = load_snapshot(tmp)

        show(engine, "hotel NEAR (17.39, 78.49) WITHIN 25 km", "buffer around a point")
        show(engine, "banquet catering NEAR Charminar", "synonyms, default radius")

        route = route_record(engine, 1, 3)
        hops = " -> ".join(str(n) for n in route["nodes"])
        print(f"\n$ geosearch route --from 1 --to 3\n  {hops}  ({route['cost_km']:g} km)")

        print("\n$ geosearch export-rdf --place 6")
        sys.stdout.write(place_ntriples(engine, 6).decode("utf-8"))


if __name__ == "__main__":
    main()
