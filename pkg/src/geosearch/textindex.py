"""Inverted text index with BM25 scoring and boolean group retrieval."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .errors import DuplicateDocId, ParseError, UnknownDoc
from .folding import fold, tokenize  # re-exported; tokenization lives with folding

__all__ = [
    "Document",
    "InvertedIndex",
    "bm25_score",
    "fold",
    "index_docs",
    "load_corpus_jsonl",
    "search_terms",
    "tokenize",
]

K1 = 1.2
B = 0.75
TITLE_WEIGHT = 2  # title tokens count twice: a cheap field boost


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    body: str
    uri: str

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")


class InvertedIndex:
    """Term postings plus the document statistics BM25 needs."""

    def __init__(self, postings: dict[str, dict[str, int]], doc_len: dict[str, int]):
        self._postings = postings
        self.doc_len = doc_len
        self.doc_count = len(doc_len)
        self.avg_len = sum(doc_len.values()) / len(doc_len) if doc_len else 0.0

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.doc_len

    def doc_ids(self) -> set[str]:
        return set(self.doc_len)

    def vocabulary(self) -> set[str]:
        return set(self._postings)

    def postings(self, term: str) -> tuple[tuple[str, int], ...]:
        """(doc_id, term frequency) pairs sorted by doc_id."""
        return tuple(self._postings.get(term, {}).items())

    def df(self, term: str) -> int:
        return len(self._postings.get(term, ()))

    def tf(self, term: str, doc_id: str) -> int:
        return self._postings.get(term, {}).get(doc_id, 0)

    def idf(self, term: str) -> float:
        df = self.df(term)
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))


def index_docs(docs: Iterable[Document]) -> InvertedIndex:
    """Index title and body of every document; title tokens are counted twice."""
    raw_postings: dict[str, dict[str, int]] = {}
    doc_len: dict[str, int] = {}
    for doc in docs:
        if doc.doc_id in doc_len:
            raise DuplicateDocId(f"duplicate doc id {doc.doc_id!r}")
        title_tokens = tokenize(doc.title)
        body_tokens = tokenize(doc.body)
        doc_len[doc.doc_id] = TITLE_WEIGHT * len(title_tokens) + len(body_tokens)
        counts = Counter(body_tokens)
        for token in title_tokens:
            counts[token] += TITLE_WEIGHT
        for token, tf in counts.items():
            raw_postings.setdefault(token, {})[doc.doc_id] = tf
    postings = {
        term: dict(sorted(docs_tf.items())) for term, docs_tf in raw_postings.items()
    }
    return InvertedIndex(postings, doc_len)


def bm25_score(ix: InvertedIndex, terms: Sequence[str], doc_id: str) -> float:
    """Sum of per-term BM25 contributions; repeated query terms count again."""
    if doc_id not in ix:
        raise UnknownDoc(f"document {doc_id!r} is not indexed")
    score = 0.0
    for term in terms:
        tf = ix.tf(term, doc_id)
        if tf == 0:
            continue
        norm = K1 * (1.0 - B + B * ix.doc_len[doc_id] / ix.avg_len)
        score += ix.idf(term) * (tf * (K1 + 1.0)) / (tf + norm)
    return score


def search_terms(ix: InvertedIndex, groups: Sequence[Iterable[str]]) -> set[str]:
    """Docs matching (OR within each group) AND (across groups).

    An empty group list is a vacuous conjunction and matches every document.
    """
    result = ix.doc_ids()
    for group in groups:
        matched: set[str] = set()
        for term in group:
            matched.update(doc_id for doc_id, _ in ix.postings(term))
        result &= matched
        if not result:
            break
    return result


def load_corpus_jsonl(stream: IO[str] | Iterable[str]) -> list[Document]:
    """Read one JSON document per line: doc_id, title, body, uri (all strings).

    The uri must be an absolute IRI since it becomes an RDF subject later;
    unknown keys are ignored.
    """
    docs: list[Document] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line:
            raise ParseError("blank line in corpus", lineno)
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"bad JSON: {e.msg}", lineno) from None
        if not isinstance(record, dict):
            raise ParseError("corpus line must be a JSON object", lineno)
        fields = {}
        for key in ("doc_id", "title", "body", "uri"):
            value = record.get(key)
            if not isinstance(value, str):
                raise ParseError(f"field {key!r} must be a string", lineno)
            fields[key] = value
        if not fields["uri"] or ":" not in fields["uri"]:
            raise ParseError(f"uri {fields['uri']!r} must be an absolute IRI", lineno)
        if fields["doc_id"] in seen:
            raise DuplicateDocId(
                f"line {lineno}: doc id {fields['doc_id']!r} already defined at line {seen[fields['doc_id']]}"
            )
        seen[fields["doc_id"]] = lineno
        try:
            docs.append(Document(**fields))
        except ValueError as e:
            raise ParseError(str(e), lineno) from None
    return docs
