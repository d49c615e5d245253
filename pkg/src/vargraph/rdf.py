"""RDF term algebra plus N-Quads and Turtle-subset readers/writers.

Terms are immutable values; serializers emit a canonical ordering so equal
inputs always produce byte-identical files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

XSD = "http://www.w3.org/2001/XMLSchema#"
XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_FLOAT = XSD + "float"
XSD_DOUBLE = XSD + "double"
XSD_DECIMAL = XSD + "decimal"
XSD_BOOLEAN = XSD + "boolean"
XSD_LONG = XSD + "long"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

NUMERIC_DATATYPES = frozenset(
    {XSD_INTEGER, XSD_FLOAT, XSD_DOUBLE, XSD_DECIMAL, XSD_LONG}
)

_IRI_BAD = re.compile(r"[\x00-\x20<>\"{}|^`\\]")
_BNODE_LABEL = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


class RdfError(ValueError):
    """Invalid RDF value or unparseable RDF text."""


class RdfParseError(RdfError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value or _IRI_BAD.search(self.value):
            raise RdfError(f"invalid IRI: {self.value!r}")


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: str | None = None

    def __post_init__(self):
        if self.language is not None and self.datatype != XSD_STRING:
            raise RdfError("literal cannot carry both a language tag and a datatype")


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __post_init__(self):
        if not _BNODE_LABEL.match(self.label):
            raise RdfError(f"invalid blank node label: {self.label!r}")


Term = Union[Iri, Literal, BlankNode]


@dataclass(frozen=True, slots=True)
class Quad:
    """An RDF statement; graph None means the default graph."""

    subject: Term
    predicate: Iri
    object: Term
    graph: Iri | None = None

    def __post_init__(self):
        if isinstance(self.subject, Literal):
            raise RdfError("quad subject must be an IRI or blank node")
        if not isinstance(self.predicate, Iri):
            raise RdfError("quad predicate must be an IRI")
        if self.graph is not None and not isinstance(self.graph, Iri):
            raise RdfError("quad graph must be an IRI")

    def triple(self) -> tuple[Term, Iri, Term]:
        return (self.subject, self.predicate, self.object)


@dataclass
class PrefixMap:
    """Ordered prefix-label -> namespace IRI map for Turtle output."""

    entries: dict[str, str] = field(default_factory=dict)

    def bind(self, label: str, namespace: str) -> None:
        if label in self.entries and self.entries[label] != namespace:
            raise RdfError(f"prefix {label!r} already bound")
        self.entries[label] = namespace

    def expand(self, label: str, local: str) -> Iri:
        if label not in self.entries:
            raise RdfError(f"unknown prefix: {label!r}")
        return Iri(self.entries[label] + local)

    def compact(self, iri: str) -> str | None:
        """Longest-namespace prefixed name for iri, or None."""
        best = None
        for label, ns in self.entries.items():
            if iri.startswith(ns) and (best is None or len(ns) > len(best[1])):
                local = iri[len(ns):]
                if _PN_LOCAL.match(local):
                    best = (label, ns, local)
        if best is None:
            return None
        return f"{best[0]}:{best[2]}"


_PN_LOCAL = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.-]*$|^$")

_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def _escape_literal(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def term_token(term: Term) -> str:
    """Single-line N-Quads spelling of a term."""
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    body = f'"{_escape_literal(term.lexical)}"'
    if term.language is not None:
        return f"{body}@{term.language}"
    if term.datatype != XSD_STRING:
        return f"{body}^^<{term.datatype}>"
    return body


def quad_sort_key(q: Quad) -> tuple[str, str, str, str]:
    g = term_token(q.graph) if q.graph is not None else ""
    return (g, term_token(q.subject), term_token(q.predicate), term_token(q.object))


def serialize_nquads(quads: Iterable[Quad]) -> str:
    """One statement per line, ordered by (graph, subject, predicate, object)."""
    lines = []
    for q in sorted(quads, key=quad_sort_key):
        parts = [term_token(q.subject), term_token(q.predicate), term_token(q.object)]
        if q.graph is not None:
            parts.append(term_token(q.graph))
        lines.append(" ".join(parts) + " .\n")
    return "".join(lines)


_UNESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


class _Scanner:
    """Cursor over one line of statement text."""

    def __init__(self, text: str, line: int):
        self.text = text
        self.pos = 0
        self.line = line

    def error(self, message: str) -> RdfParseError:
        return RdfParseError(message, self.line)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def read_iri(self) -> Iri:
        self.expect("<")
        end = self.text.find(">", self.pos)
        if end < 0:
            raise self.error("unterminated IRI")
        value = self.text[self.pos:end]
        self.pos = end + 1
        try:
            return Iri(value)
        except RdfError as exc:
            raise self.error(str(exc)) from exc

    def read_quoted(self) -> str:
        self.expect('"')
        out = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated literal")
            ch = self.text[self.pos]
            self.pos += 1
            if ch == '"':
                return "".join(out)
            if ch == "\\":
                if self.pos >= len(self.text):
                    raise self.error("dangling escape")
                esc = self.text[self.pos]
                self.pos += 1
                if esc in _UNESCAPES:
                    out.append(_UNESCAPES[esc])
                elif esc == "u":
                    out.append(chr(int(self.text[self.pos:self.pos + 4], 16)))
                    self.pos += 4
                elif esc == "U":
                    out.append(chr(int(self.text[self.pos:self.pos + 8], 16)))
                    self.pos += 8
                else:
                    raise self.error(f"unknown escape \\{esc}")
            else:
                out.append(ch)

    def read_literal(self) -> Literal:
        lexical = self.read_quoted()
        if self.pos < len(self.text) and self.text[self.pos] == "@":
            self.pos += 1
            m = re.match(r"[A-Za-z]+(-[A-Za-z0-9]+)*", self.text[self.pos:])
            if not m:
                raise self.error("malformed language tag")
            self.pos += m.end()
            return Literal(lexical, language=m.group(0))
        if self.text[self.pos:self.pos + 2] == "^^":
            self.pos += 2
            return Literal(lexical, datatype=self.read_iri().value)
        return Literal(lexical)

    def read_bnode(self) -> BlankNode:
        if self.text[self.pos:self.pos + 2] != "_:":
            raise self.error("expected blank node")
        self.pos += 2
        m = re.match(r"[A-Za-z0-9][A-Za-z0-9_.-]*", self.text[self.pos:])
        if not m:
            raise self.error("malformed blank node label")
        self.pos += m.end()
        return BlankNode(m.group(0))

    def read_term(self) -> Term:
        ch = self.peek()
        if ch == "<":
            return self.read_iri()
        if ch == '"':
            return self.read_literal()
        if ch == "_":
            return self.read_bnode()
        raise self.error(f"unexpected character {ch!r}")


def parse_term_token(token: str) -> Term:
    """Inverse of term_token for a single standalone term."""
    sc = _Scanner(token, 0)
    term = sc.read_term()
    if not sc.at_end():
        raise RdfError(f"trailing text in term token: {token!r}")
    return term


def parse_nquads(text: str) -> list[Quad]:
    """Parse N-Quads text; comments and blank lines are skipped."""
    quads = []
    # split on \n only: other Unicode line separators are legal inside literals
    for line_no, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        sc = _Scanner(raw, line_no)
        subject = sc.read_term()
        predicate = sc.read_term()
        obj = sc.read_term()
        graph = None
        if sc.peek() not in (".", ""):
            g = sc.read_term()
            if not isinstance(g, Iri):
                raise sc.error("graph label must be an IRI")
            graph = g
        if sc.peek() != ".":
            raise sc.error("missing final dot")
        sc.pos += 1
        if not sc.at_end():
            raise sc.error("trailing text after statement")
        try:
            quads.append(Quad(subject, predicate, obj, graph))  # type: ignore[arg-type]
        except RdfError as exc:
            raise sc.error(str(exc)) from exc
    return quads


def _turtle_object(term: Term, prefixes: PrefixMap) -> str:
    # bare token keeps integer literals readable, as in common Turtle output
    if isinstance(term, Literal) and term.datatype == XSD_INTEGER:
        if re.fullmatch(r"[+-]?[0-9]+", term.lexical):
            return term.lexical
    if isinstance(term, Iri):
        compact = prefixes.compact(term.value)
        if compact is not None:
            return compact
    if isinstance(term, Literal) and term.datatype not in (XSD_STRING,):
        compact = prefixes.compact(term.datatype)
        if compact is not None and term.language is None:
            return f'"{_escape_literal(term.lexical)}"^^{compact}'
    return term_token(term)


def serialize_turtle(triples: Iterable[Quad], prefixes: PrefixMap | None = None) -> str:
    """Write default-graph triples grouped by subject.

    Within a subject block, rdf:type comes first (as ``a``) and the other
    predicate-object pairs follow in canonical order.
    """
    prefixes = prefixes or PrefixMap()
    by_subject: dict[str, tuple[Term, list[Quad]]] = {}
    for t in triples:
        if t.graph is not None:
            raise RdfError("Turtle output cannot carry named graphs")
        key = term_token(t.subject)
        by_subject.setdefault(key, (t.subject, []))[1].append(t)

    out = []
    for label in sorted(prefixes.entries):
        out.append(f"@prefix {label}: <{prefixes.entries[label]}> .\n")
    if out:
        out.append("\n")

    def po_key(t: Quad) -> tuple[int, str, str]:
        is_type = 0 if t.predicate.value == RDF_TYPE else 1
        pred = _turtle_predicate(t.predicate, prefixes)
        return (is_type, pred, _turtle_object(t.object, prefixes))

    first_block = True
    for skey in sorted(by_subject):
        subject, ts = by_subject[skey]
        if not first_block:
            out.append("\n")
        first_block = False
        entries = [
            f"{_turtle_predicate(t.predicate, prefixes)} {_turtle_object(t.object, prefixes)}"
            for t in sorted(set(ts), key=po_key)
        ]
        sub = _turtle_object(subject, prefixes) if isinstance(subject, Iri) else term_token(subject)
        if len(entries) == 1:
            out.append(f"{sub} {entries[0]} .\n")
        else:
            out.append(f"{sub} {entries[0]} ;\n")
            for entry in entries[1:-1]:
                out.append(f"    {entry} ;\n")
            out.append(f"    {entries[-1]} .\n")
    return "".join(out)


def _turtle_predicate(pred: Iri, prefixes: PrefixMap) -> str:
    if pred.value == RDF_TYPE:
        return "a"
    compact = prefixes.compact(pred.value)
    return compact if compact is not None else f"<{pred.value}>"


class _TurtleParser:
    """Parses the Turtle subset emitted by serialize_turtle."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def line(self) -> int:
        return self.text.count("\n", 0, self.pos) + 1

    def error(self, message: str) -> RdfParseError:
        return RdfParseError(message, self.line())

    def skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self.pos += 1
            elif ch == "#":
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) if nl < 0 else nl
            else:
                return

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def match_word(self, word: str) -> bool:
        self.skip_ws()
        end = self.pos + len(word)
        if self.text[self.pos:end] == word and (
            end >= len(self.text) or not self.text[end].isalnum()
        ):
            self.pos = end
            return True
        return False

    def _scanner(self) -> _Scanner:
        nl = self.text.find("\n", self.pos)
        segment = self.text[self.pos:] if nl < 0 else self.text[self.pos:nl]
        sc = _Scanner(segment, self.line())
        return sc

    def read_simple_term(self) -> Term:
        self.skip_ws()
        sc = self._scanner()
        term = sc.read_term()
        self.pos += sc.pos
        return term

    def read_pname(self, prefixes: PrefixMap) -> Iri:
        self.skip_ws()
        m = re.match(r"([A-Za-z][A-Za-z0-9_-]*)?:([A-Za-z0-9_][A-Za-z0-9_.-]*|)", self.text[self.pos:])
        if not m:
            raise self.error("expected prefixed name")
        self.pos += m.end()
        try:
            return prefixes.expand(m.group(1) or "", m.group(2))
        except RdfError as exc:
            raise self.error(str(exc)) from exc

    def read_node(self, prefixes: PrefixMap) -> Term:
        ch = self.peek()
        if ch in "<\"_":
            term = self.read_simple_term()
            return term
        m = re.match(r"[+-]?[0-9]+(?![0-9.eE])", self.text[self.pos:])
        if m:
            self.pos += m.end()
            return Literal(m.group(0), datatype=XSD_INTEGER)
        iri = self.read_pname(prefixes)
        # may be a typed-literal datatype position; caller handles "^^"
        return iri

    def read_object(self, prefixes: PrefixMap) -> Term:
        ch = self.peek()
        if ch == '"':
            start_line = self.line()
            sc = self._scanner()
            lexical = sc.read_quoted()
            self.pos += sc.pos
            if self.pos < len(self.text) and self.text[self.pos] == "@":
                self.pos += 1
                m = re.match(r"[A-Za-z]+(-[A-Za-z0-9]+)*", self.text[self.pos:])
                if not m:
                    raise RdfParseError("malformed language tag", start_line)
                self.pos += m.end()
                return Literal(lexical, language=m.group(0))
            if self.text[self.pos:self.pos + 2] == "^^":
                self.pos += 2
                if self.peek() == "<":
                    dt = self.read_simple_term()
                else:
                    dt = self.read_pname(prefixes)
                return Literal(lexical, datatype=dt.value)  # type: ignore[union-attr]
            return Literal(lexical)
        return self.read_node(prefixes)

    def read_predicate(self, prefixes: PrefixMap) -> Iri:
        if self.match_word("a"):
            return Iri(RDF_TYPE)
        if self.peek() == "<":
            term = self.read_simple_term()
            return term  # type: ignore[return-value]
        return self.read_pname(prefixes)

    def parse(self) -> list[Quad]:
        prefixes = PrefixMap()
        quads: list[Quad] = []
        while not self.at_end():
            if self.match_word("@prefix"):
                self.skip_ws()
                m = re.match(r"([A-Za-z][A-Za-z0-9_-]*)?:", self.text[self.pos:])
                if not m:
                    raise self.error("malformed @prefix label")
                label = m.group(1) or ""
                self.pos += m.end()
                ns = self.read_simple_term()
                if not isinstance(ns, Iri):
                    raise self.error("@prefix namespace must be an IRI")
                self.expect(".")
                prefixes.entries[label] = ns.value
                continue
            subject = self.read_node(prefixes)
            if isinstance(subject, Literal):
                raise self.error("subject cannot be a literal")
            while True:
                predicate = self.read_predicate(prefixes)
                obj = self.read_object(prefixes)
                quads.append(Quad(subject, predicate, obj))
                ch = self.peek()
                if ch == ";":
                    self.pos += 1
                    if self.peek() == ".":  # tolerate "; ." tail
                        self.pos += 1
                        break
                    continue
                if ch == ".":
                    self.pos += 1
                    break
                raise self.error(f"expected ';' or '.', found {ch!r}")
        return quads


def parse_turtle(text: str) -> list[Quad]:
    """Parse the Turtle subset produced by serialize_turtle (default graph)."""
    return _TurtleParser(text).parse()
