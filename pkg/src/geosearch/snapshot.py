"""Engine assembly and the on-disk snapshot layout.

A snapshot is a flat directory: byte copies of the inputs (gazetteer.tsv,
corpus.jsonl, lexicon.json, optionally network.tsv), the generated
annotations.nt, and a meta.json carrying the config, the counts and a
sha256 per file. Nothing in it depends on the build time, so rebuilding
from the same inputs reproduces every file byte for byte.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .annotate import annotate, parse_footprint_wkt, PRED_FOOTPRINT, PRED_MENTIONS_PLACE
from .config import EngineConfig
from .errors import ParseError, SnapshotError
from .expand import EMPTY_LEXICON, ConceptLexicon, load_lexicon
from .gazetteer import Gazetteer, load_tsv, parse_entity_iri
from .geo import PathNetwork, load_edge_file
from .rdf import Literal, Triple, parse_ntriples, serialize_ntriples
from .spatial import Geometry, SpatialIndex
from .textindex import Document, InvertedIndex, index_docs, load_corpus_jsonl

FORMAT_VERSION = 1

GAZETTEER_FILE = "gazetteer.tsv"
CORPUS_FILE = "corpus.jsonl"
LEXICON_FILE = "lexicon.json"
NETWORK_FILE = "network.tsv"
ANNOTATIONS_FILE = "annotations.nt"
META_FILE = "meta.json"

EMPTY_LEXICON_BYTES = b"[]\n"


@dataclass
class Engine:
    """Everything the query pipeline needs, fully in memory."""

    gazetteer: Gazetteer
    lexicon: ConceptLexicon
    documents: dict[str, Document]
    text_index: InvertedIndex
    spatial_index: SpatialIndex
    footprints: dict[str, Geometry]
    doc_places: dict[str, tuple[int, ...]]
    annotation_triples: tuple[Triple, ...]
    mention_count: int
    network: PathNetwork | None
    config: EngineConfig


@dataclass(frozen=True)
class BuildReport:
    entry_count: int
    document_count: int
    mention_count: int
    triple_count: int

    def lines(self) -> list[str]:
        return [
            f"gazetteer entries: {self.entry_count}",
            f"documents indexed: {self.document_count}",
            f"toponym mentions:  {self.mention_count}",
            f"annotation triples: {self.triple_count}",
        ]


def build_engine(
    gazetteer: Gazetteer,
    documents: list[Document],
    lexicon: ConceptLexicon = EMPTY_LEXICON,
    network: PathNetwork | None = None,
    config: EngineConfig | None = None,
) -> Engine:
    """Index a corpus against a gazetteer and annotate every document."""
    cfg = config if config is not None else EngineConfig()
    by_id: dict[str, Document] = {}
    by_uri: dict[str, str] = {}
    for doc in documents:
        by_id[doc.doc_id] = doc
        # uris become RDF subjects, so two docs must not share one
        if doc.uri in by_uri:
            raise ParseError(
                f"documents {by_uri[doc.uri]!r} and {doc.doc_id!r} share uri {doc.uri}"
            )
        by_uri[doc.uri] = doc.doc_id

    text_index = index_docs(documents)
    footprints: dict[str, Geometry] = {}
    doc_places: dict[str, tuple[int, ...]] = {}
    triples: list[Triple] = []
    mention_count = 0
    for doc in documents:
        ann = annotate(doc, gazetteer)
        mention_count += len(ann.resolved)
        if ann.footprint is not None:
            footprints[doc.doc_id] = ann.footprint
            doc_places[doc.doc_id] = tuple(sorted({pid for _, pid in ann.resolved}))
        triples.extend(ann.triples)

    spatial_index = SpatialIndex.build(footprints.items())
    return Engine(
        gazetteer=gazetteer,
        lexicon=lexicon,
        documents=by_id,
        text_index=text_index,
        spatial_index=spatial_index,
        footprints=footprints,
        doc_places=doc_places,
        annotation_triples=tuple(triples),
        mention_count=mention_count,
        network=network,
        config=cfg,
    )


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read_bytes(path: Path, what: str) -> bytes:
    try:
        return path.read_bytes()
    except OSError as e:
        raise SnapshotError(f"cannot read {what} {path}: {e.strerror or e}") from None


def build_snapshot(
    out_dir: str | Path,
    gazetteer_path: str | Path,
    corpus_path: str | Path,
    lexicon_path: str | Path | None = None,
    network_path: str | Path | None = None,
    config: EngineConfig | None = None,
) -> BuildReport:
    """Parse the inputs, annotate, and write a snapshot directory.

    Input files are copied into the snapshot unmodified; a missing lexicon
    is stored as an empty JSON array so every snapshot is self-contained.
    """
    cfg = config if config is not None else EngineConfig()

    gazetteer_bytes = _read_bytes(Path(gazetteer_path), "gazetteer")
    corpus_bytes = _read_bytes(Path(corpus_path), "corpus")
    lexicon_bytes = (
        _read_bytes(Path(lexicon_path), "lexicon") if lexicon_path is not None else EMPTY_LEXICON_BYTES
    )
    network_bytes = _read_bytes(Path(network_path), "network") if network_path is not None else None

    gazetteer = load_tsv(io.StringIO(gazetteer_bytes.decode("utf-8")))
    documents = load_corpus_jsonl(io.StringIO(corpus_bytes.decode("utf-8")))
    lexicon = load_lexicon(lexicon_bytes.decode("utf-8"))
    network = None
    if network_bytes is not None:
        coords = {entry.id: entry.location for entry in gazetteer}
        network = load_edge_file(io.StringIO(network_bytes.decode("utf-8")), coords)

    engine = build_engine(gazetteer, documents, lexicon, network, cfg)
    annotations_bytes = serialize_ntriples(engine.annotation_triples).encode("utf-8")

    files = {
        GAZETTEER_FILE: gazetteer_bytes,
        CORPUS_FILE: corpus_bytes,
        LEXICON_FILE: lexicon_bytes,
        ANNOTATIONS_FILE: annotations_bytes,
    }
    if network_bytes is not None:
        files[NETWORK_FILE] = network_bytes

    report = BuildReport(
        entry_count=len(gazetteer),
        document_count=len(documents),
        mention_count=engine.mention_count,
        triple_count=len(engine.annotation_triples),
    )
    meta = {
        "format_version": FORMAT_VERSION,
        "config": cfg.to_dict(),
        "counts": {
            "entries": report.entry_count,
            "documents": report.document_count,
            "mentions": report.mention_count,
            "triples": report.triple_count,
        },
        "files": {name: _sha256(data) for name, data in sorted(files.items())},
    }
    meta_bytes = (json.dumps(meta, sort_keys=True, indent=2) + "\n").encode("utf-8")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, data in files.items():
        (out / name).write_bytes(data)
    (out / META_FILE).write_bytes(meta_bytes)
    return report


def _parse_annotations(
    data: bytes, documents: dict[str, Document], gazetteer: Gazetteer
) -> tuple[dict[str, Geometry], dict[str, tuple[int, ...]], tuple[Triple, ...]]:
    try:
        triples = parse_ntriples(io.StringIO(data.decode("utf-8")))
    except ParseError as e:
        raise SnapshotError(f"bad annotations file: {e}") from None

    by_uri = {doc.uri: doc.doc_id for doc in documents.values()}
    places: dict[str, set[int]] = {}
    footprints: dict[str, Geometry] = {}
    for t in triples:
        doc_id = by_uri.get(t.subject)
        if doc_id is None:
            raise SnapshotError(f"annotation subject {t.subject} matches no document")
        if t.predicate == PRED_MENTIONS_PLACE:
            place_id = parse_entity_iri(t.object) if isinstance(t.object, str) else None
            if place_id is None or place_id not in gazetteer:
                raise SnapshotError(f"annotation references unknown place {t.object!r}")
            places.setdefault(doc_id, set()).add(place_id)
        elif t.predicate == PRED_FOOTPRINT:
            if not isinstance(t.object, Literal):
                raise SnapshotError(f"footprint of {doc_id} is not a literal")
            try:
                footprints[doc_id] = parse_footprint_wkt(t.object.lexical)
            except ParseError as e:
                raise SnapshotError(f"bad footprint for {doc_id}: {e}") from None
        else:
            raise SnapshotError(f"unexpected annotation predicate {t.predicate}")

    missing = sorted(set(places) ^ set(footprints))
    if missing:
        raise SnapshotError(f"annotations incomplete for: {', '.join(missing)}")
    doc_places = {doc_id: tuple(sorted(ids)) for doc_id, ids in places.items()}
    return footprints, doc_places, tuple(triples)


def load_snapshot(snapshot_dir: str | Path) -> Engine:
    """Load a snapshot, verifying every file against its recorded sha256."""
    root = Path(snapshot_dir)
    if not root.is_dir():
        raise SnapshotError(f"{root} is not a snapshot directory")
    meta_path = root / META_FILE
    if not meta_path.is_file():
        raise SnapshotError(f"{root} has no {META_FILE}")
    try:
        meta = json.loads(meta_path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise SnapshotError(f"cannot read {META_FILE}: {e}") from None
    if not isinstance(meta, dict) or meta.get("format_version") != FORMAT_VERSION:
        raise SnapshotError(
            f"unsupported snapshot format {meta.get('format_version')!r}"
            if isinstance(meta, dict)
            else "meta.json is not an object"
        )
    stamps = meta.get("files")
    if not isinstance(stamps, dict):
        raise SnapshotError("meta.json has no file stamps")
    for required in (GAZETTEER_FILE, CORPUS_FILE, LEXICON_FILE, ANNOTATIONS_FILE):
        if required not in stamps:
            raise SnapshotError(f"meta.json lists no {required}")

    contents: dict[str, bytes] = {}
    for name, expected in sorted(stamps.items()):
        path = root / name
        if not path.is_file():
            raise SnapshotError(f"snapshot file {name} is missing")
        data = _read_bytes(path, "snapshot file")
        if _sha256(data) != expected:
            raise SnapshotError(f"snapshot file {name} does not match its recorded hash")
        contents[name] = data

    try:
        config = EngineConfig(**meta.get("config", {}))
    except (TypeError, ValueError) as e:
        raise SnapshotError(f"bad config in meta.json: {e}") from None

    try:
        gazetteer = load_tsv(io.StringIO(contents[GAZETTEER_FILE].decode("utf-8")))
        documents = load_corpus_jsonl(io.StringIO(contents[CORPUS_FILE].decode("utf-8")))
        lexicon = load_lexicon(contents[LEXICON_FILE].decode("utf-8"))
        network = None
        if NETWORK_FILE in contents:
            coords = {entry.id: entry.location for entry in gazetteer}
            network = load_edge_file(io.StringIO(contents[NETWORK_FILE].decode("utf-8")), coords)
    except ParseError as e:
        raise SnapshotError(f"bad snapshot input: {e}") from None

    by_id = {doc.doc_id: doc for doc in documents}
    if len({doc.uri for doc in documents}) != len(documents):
        raise SnapshotError("snapshot corpus has documents sharing a uri")
    footprints, doc_places, triples = _parse_annotations(
        contents[ANNOTATIONS_FILE], by_id, gazetteer
    )

    counts = meta.get("counts", {})
    mention_count = counts.get("mentions", 0) if isinstance(counts, dict) else 0
    return Engine(
        gazetteer=gazetteer,
        lexicon=lexicon,
        documents=by_id,
        text_index=index_docs(documents),
        spatial_index=SpatialIndex.build(footprints.items()),
        footprints=footprints,
        doc_places=doc_places,
        annotation_triples=triples,
        mention_count=mention_count if isinstance(mention_count, int) else 0,
        network=network,
        config=config,
    )
