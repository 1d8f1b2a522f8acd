"""Minimal RDF machinery: triples, an indexed store, and N-Triples I/O.

The supported syntax is deliberately small: subjects and predicates are
absolute IRIs, objects are IRIs or plain/typed literals. Blank nodes are
rejected; language tags are accepted on input and dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import IO, Iterable, Union

from .errors import ParseError

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_IRI_FORBIDDEN = set(' <>"{}|^`\\') | {chr(c) for c in range(0x21)}


def _check_iri(iri: str, role: str) -> str:
    if not _SCHEME_RE.match(iri):
        raise ValueError(f"{role} must be an absolute IRI, got {iri!r}")
    bad = set(iri) & _IRI_FORBIDDEN
    if bad:
        raise ValueError(f"{role} contains forbidden characters {sorted(bad)!r}")
    return iri


@dataclass(frozen=True)
class Literal:
    """A literal object; `datatype` is an IRI or None for plain literals."""

    lexical: str
    datatype: str | None = None

    def __post_init__(self):
        if self.lexical == "":
            raise ValueError("empty literal")
        if self.datatype is not None:
            _check_iri(self.datatype, "datatype")


RdfObject = Union[str, Literal]


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: RdfObject

    def __post_init__(self):
        _check_iri(self.subject, "subject")
        _check_iri(self.predicate, "predicate")
        if isinstance(self.object, str):
            _check_iri(self.object, "object")


def object_key(obj: RdfObject) -> str:
    """Lexical sort key for an object: the IRI itself or the literal form."""
    return obj if isinstance(obj, str) else obj.lexical


class TripleStore:
    """Insertion-ordered triple list with hash indexes on each position."""

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: list[Triple] = []
        self._by_s: dict[str, list[int]] = {}
        self._by_p: dict[str, list[int]] = {}
        self._by_o: dict[RdfObject, list[int]] = {}
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> None:
        pos = len(self._triples)
        self._triples.append(triple)
        self._by_s.setdefault(triple.subject, []).append(pos)
        self._by_p.setdefault(triple.predicate, []).append(pos)
        self._by_o.setdefault(triple.object, []).append(pos)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self):
        return iter(self._triples)

    def match(self, s: str | None = None, p: str | None = None, o: RdfObject | None = None) -> list[Triple]:
        """Triples matching every bound position, in insertion order."""
        candidate_lists = []
        if s is not None:
            candidate_lists.append(self._by_s.get(s, []))
        if p is not None:
            candidate_lists.append(self._by_p.get(p, []))
        if o is not None:
            candidate_lists.append(self._by_o.get(o, []))
        if not candidate_lists:
            return list(self._triples)
        positions = min(candidate_lists, key=len)
        out = []
        for pos in positions:
            t = self._triples[pos]
            if (s is None or t.subject == s) and (p is None or t.predicate == p) and (
                o is None or t.object == o
            ):
                out.append(t)
        return out


def match_pattern(
    triples: TripleStore | Iterable[Triple],
    s: str | None = None,
    p: str | None = None,
    o: RdfObject | None = None,
) -> list[Triple]:
    """Pattern match over a store (indexed) or any iterable of triples (scan)."""
    if isinstance(triples, TripleStore):
        return triples.match(s, p, o)
    return [
        t
        for t in triples
        if (s is None or t.subject == s)
        and (p is None or t.predicate == p)
        and (o is None or t.object == o)
    ]


# ---------------------------------------------------------------------------
# N-Triples serialization

_LITERAL_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_literal(text: str) -> str:
    out = []
    for ch in text:
        if ch in _LITERAL_ESCAPES:
            out.append(_LITERAL_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def serialize_triple(t: Triple) -> str:
    if isinstance(t.object, str):
        obj = f"<{t.object}>"
    elif t.object.datatype is not None:
        obj = f'"{_escape_literal(t.object.lexical)}"^^<{t.object.datatype}>'
    else:
        obj = f'"{_escape_literal(t.object.lexical)}"'
    return f"<{t.subject}> <{t.predicate}> {obj} ."


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    """One triple per line, with a trailing newline when non-empty."""
    lines = [serialize_triple(t) for t in triples]
    return "\n".join(lines) + "\n" if lines else ""


# ---------------------------------------------------------------------------
# N-Triples parsing

_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f", "'": "'"}


class _LineScanner:
    def __init__(self, line: str, lineno: int):
        self.line = line
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str) -> ParseError:
        return ParseError(f"{message} (column {self.pos + 1})", self.lineno)

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def peek(self) -> str:
        return self.line[self.pos] if self.pos < len(self.line) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def expect(self, ch: str, what: str) -> None:
        if self.take() != ch:
            self.pos -= 1
            raise self.error(f"expected {what}")

    def read_uchar(self) -> str:
        kind = self.take()
        width = 4 if kind == "u" else 8
        digits = self.line[self.pos : self.pos + width]
        if len(digits) != width or any(d not in "0123456789abcdefABCDEF" for d in digits):
            raise self.error("bad \\u escape")
        self.pos += width
        return chr(int(digits, 16))

    def read_iri(self) -> str:
        self.expect("<", "'<'")
        out = []
        while True:
            if self.at_end():
                raise self.error("unterminated IRI")
            ch = self.take()
            if ch == ">":
                break
            if ch == "\\":
                nxt = self.peek()
                if nxt in "uU":
                    out.append(self.read_uchar())
                else:
                    raise self.error("bad escape in IRI")
            else:
                out.append(ch)
        return "".join(out)

    def read_quoted(self) -> str:
        self.expect('"', "'\"'")
        out = []
        while True:
            if self.at_end():
                raise self.error("unterminated literal")
            ch = self.take()
            if ch == '"':
                break
            if ch == "\\":
                nxt = self.take()
                if nxt in "uU":
                    self.pos -= 1
                    out.append(self.read_uchar())
                elif nxt in _UNESCAPES:
                    out.append(_UNESCAPES[nxt])
                else:
                    raise self.error(f"bad escape \\{nxt}")
            else:
                out.append(ch)
        return "".join(out)


def parse_ntriples(stream: IO[str] | Iterable[str]) -> list[Triple]:
    """Parse N-Triples text; blank and comment lines are skipped."""
    triples = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        sc = _LineScanner(line, lineno)
        sc.skip_ws()
        if sc.peek() == "_":
            raise sc.error("blank nodes are not supported")
        subject = sc.read_iri()
        sc.skip_ws()
        predicate = sc.read_iri()
        sc.skip_ws()
        if sc.peek() == "_":
            raise sc.error("blank nodes are not supported")
        obj: RdfObject
        if sc.peek() == "<":
            obj = sc.read_iri()
        elif sc.peek() == '"':
            lexical = sc.read_quoted()
            datatype = None
            if sc.peek() == "^":
                sc.expect("^", "'^^'")
                sc.expect("^", "'^^'")
                datatype = sc.read_iri()
            elif sc.peek() == "@":
                sc.take()
                while not sc.at_end() and (sc.peek().isalnum() or sc.peek() == "-"):
                    sc.take()  # language tags are dropped
            try:
                obj = Literal(lexical, datatype)
            except ValueError as e:
                raise ParseError(str(e), lineno) from None
        else:
            raise sc.error("expected IRI or literal object")
        sc.skip_ws()
        sc.expect(".", "terminating '.'")
        sc.skip_ws()
        if not sc.at_end():
            raise sc.error("trailing characters after '.'")
        try:
            triples.append(Triple(subject, predicate, obj))
        except ValueError as e:
            raise ParseError(str(e), lineno) from None
    return triples
