#!/usr/bin/env python3
"""Regenerate data/demo from scratch.

The TSV rows end in empty optional columns, so the file carries trailing
tabs that editors love to strip; this script is the canonical source.
"""

import json
from pathlib import Path

DEMO = Path(__file__).resolve().parent.parent / "data" / "demo"

# id, name, alt_names, lat, lon, class, code, parent, population, elevation
ROWS = [
    ("1", "Hyderabad", "Bhagyanagar,Baghnagar", "17.38", "78.47", "P", "PPLA", "8", "6809970", ""),
    ("2", "Hyderabad", "Haidarabad", "25.396", "68.377", "P", "PPL", "4", "1386330", ""),
    ("3", "Mumbai", "Bombay", "19.076", "72.877", "P", "PPLA", "7", "12442373", ""),
    ("4", "Sindh", "", "25.8943", "68.5247", "A", "ADM1", "5", "", ""),
    ("5", "Pakistan", "", "30.0", "70.0", "A", "PCLI", "", "", ""),
    ("6", "Charminar", "Char Minar,Four Minarets", "17.3616", "78.4747", "S", "MNMT", "1", "", ""),
    ("7", "India", "", "22.0", "79.0", "A", "PCLI", "", "", ""),
    ("8", "Telangana", "", "17.8739", "79.1", "A", "ADM1", "7", "", ""),
    ("9", "Deccan Plateau", "", "17.0", "77.0", "T", "PLAT", "", "", ""),
]

DOCS = [
    {
        "doc_id": "hyd-lodging-1",
        "title": "Grand Lodging Hotel",
        "body": "Comfortable lodging at a classic hotel near Charminar in Hyderabad. Rooms face the old city.",
        "uri": "urn:doc:hyd-lodging-1",
    },
    {
        "doc_id": "hyd-guesthouse-2",
        "title": "Lakeview Guest House",
        "body": "A quiet guest house and budget hotel in Hyderabad with a lake view and breakfast.",
        "uri": "urn:doc:hyd-guesthouse-2",
    },
    {
        "doc_id": "hyd-catering-3",
        "title": "Spice Garden Banquets",
        "body": "Banquet halls and catering for weddings; we also cater events at partner hotels across Hyderabad.",
        "uri": "urn:doc:hyd-catering-3",
    },
    {
        "doc_id": "mum-lodging-4",
        "title": "Seaside Lodging Hotel",
        "body": "Beachside lodging and a family hotel in Mumbai close to the promenade.",
        "uri": "urn:doc:mum-lodging-4",
    },
]

LEXICON = [
    {"id": "hotel", "preferred": "hotel", "synonyms": ["hotels", "motel"]},
    {
        "id": "lodging",
        "preferred": "lodging",
        "synonyms": ["guest house", "inn", "accommodation"],
        "parent": "hospitality",
    },
    {
        "id": "catering",
        "preferred": "catering",
        "synonyms": ["banquet", "banquets"],
        "parent": "hospitality",
    },
]

EDGES = [("1", "6", "1.0"), ("6", "3", "1.0"), ("1", "3", "3.0")]

CONFIG = {"alpha": 0.5, "top_k": 10, "default_radius_km": 10.0, "footprint_pad_deg": 0.1}


def main() -> None:
    DEMO.mkdir(parents=True, exist_ok=True)
    (DEMO / "gazetteer.tsv").write_text(
        "".join("\t".join(row) + "\n" for row in ROWS), encoding="utf-8"
    )
    (DEMO / "corpus.jsonl").write_text(
        "".join(json.dumps(doc, ensure_ascii=False) + "\n" for doc in DOCS), encoding="utf-8"
    )
    (DEMO / "lexicon.json").write_text(
        json.dumps(LEXICON, indent=2) + "\n", encoding="utf-8"
    )
    (DEMO / "network.tsv").write_text(
        "".join("\t".join(edge) + "\n" for edge in EDGES), encoding="utf-8"
    )
    (DEMO / "config.json").write_text(json.dumps(CONFIG, indent=2) + "\n", encoding="utf-8")
    print(f"wrote demo data to {DEMO}")


if __name__ == "__main__":
    main()
