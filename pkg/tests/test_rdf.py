"""Term algebra and N-Quads / Turtle round-trip tests."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vargraph.rdf import (
    XSD_FLOAT,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    PrefixMap,
    Quad,
    RdfError,
    RdfParseError,
    parse_nquads,
    parse_term_token,
    parse_turtle,
    serialize_nquads,
    serialize_turtle,
    term_token,
)

AGE_LINE = (
    "<https://www.ncbi.nlm.nih.gov/sra/?term=SRR12570589> "
    "<https://www.wikidata.org/wiki/Q11904283> "
    '"61.0"^^<http://www.w3.org/2001/XMLSchema#float> '
    "<sg://SRR12570589> .\n"
)


def test_age_quad_serializes_to_reference_line():
    q = Quad(
        Iri("https://www.ncbi.nlm.nih.gov/sra/?term=SRR12570589"),
        Iri("https://www.wikidata.org/wiki/Q11904283"),
        Literal("61.0", datatype=XSD_FLOAT),
        Iri("sg://SRR12570589"),
    )
    assert serialize_nquads([q]) == AGE_LINE


def test_age_line_parses_back():
    (q,) = parse_nquads(AGE_LINE)
    assert q.graph == Iri("sg://SRR12570589")
    assert q.predicate == Iri("https://www.wikidata.org/wiki/Q11904283")
    assert q.object == Literal("61.0", datatype=XSD_FLOAT)


def test_empty_roundtrip():
    assert serialize_nquads([]) == ""
    assert parse_nquads("") == []


def test_comments_and_blank_lines_skipped():
    text = "# comment\n\n" + AGE_LINE
    assert len(parse_nquads(text)) == 1


def test_literal_escaping_roundtrip():
    lit = Literal('he said "hi"\n\ttab\\end')
    token = term_token(lit)
    assert "\n" not in token
    assert parse_term_token(token) == lit


def test_structural_literal_inequality():
    assert Literal("5", datatype=XSD_INTEGER) != Literal("5", datatype=XSD_STRING)


def test_invalid_terms_rejected():
    with pytest.raises(RdfError):
        Iri("")
    with pytest.raises(RdfError):
        Iri("http://x.org/a b")
    with pytest.raises(RdfError):
        Quad(Literal("x"), Iri("http://p"), Literal("y"))
    with pytest.raises(RdfError):
        Literal("x", datatype="http://dt", language="en")


@pytest.mark.parametrize(
    "bad,msg",
    [
        ("<http://a> <http://b> <http://c>", "missing final dot"),
        ("<http://a> <http://b> <http://c .", "unterminated IRI"),
        ('<http://a> <http://b> "oops .', "unterminated literal"),
    ],
)
def test_parse_errors_carry_line_numbers(bad, msg):
    with pytest.raises(RdfParseError, match="line 2"):
        parse_nquads("# ok\n" + bad + "\n")
    with pytest.raises(RdfParseError, match=msg):
        parse_nquads(bad)


# --- randomized round-trips ---------------------------------------------

_iris = st.builds(
    lambda host, path: Iri(f"http://{host}.example/{path}"),
    st.text(alphabet="abcdefgh", min_size=1, max_size=6),
    st.text(alphabet="abcdefgh0123456789_-", max_size=10),
)
_bnodes = st.builds(BlankNode, st.from_regex(r"[A-Za-z0-9][A-Za-z0-9_]{0,8}", fullmatch=True))
_plain_literals = st.builds(Literal, st.text(max_size=24))
_typed_literals = st.one_of(
    st.builds(lambda n: Literal(str(n), datatype=XSD_INTEGER), st.integers(-10**6, 10**6)),
    st.builds(lambda x: Literal(repr(x), datatype=XSD_FLOAT), st.floats(allow_nan=False, allow_infinity=False)),
    st.builds(
        lambda s, lang: Literal(s, language=lang),
        st.text(max_size=12),
        st.from_regex(r"[a-z]{2}(-[a-z0-9]{1,4})?", fullmatch=True),
    ),
)
_objects = st.one_of(_iris, _bnodes, _plain_literals, _typed_literals)
_quads = st.builds(
    Quad,
    st.one_of(_iris, _bnodes),
    _iris,
    _objects,
    st.one_of(st.none(), _iris),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(_quads, max_size=30))
def test_nquads_roundtrip(quads):
    assert set(parse_nquads(serialize_nquads(quads))) == set(quads)


@settings(max_examples=200, deadline=None)
@given(st.lists(_quads.map(lambda q: Quad(q.subject, q.predicate, q.object)), max_size=20))
def test_turtle_roundtrip(triples):
    text = serialize_turtle(triples)
    assert set(parse_turtle(text)) == set(triples)


@settings(max_examples=100, deadline=None)
@given(st.lists(_quads, max_size=20))
def test_serialization_deterministic(quads):
    assert serialize_nquads(quads) == serialize_nquads(list(reversed(quads)))


def test_turtle_with_prefixes_roundtrip():
    prefixes = PrefixMap()
    prefixes.bind("ns1", "http://sg.org/")
    triples = [
        Quad(Iri("http://sg.org/v1"), Iri("http://sg.org/has_pos"), Literal("7", datatype=XSD_INTEGER)),
        Quad(Iri("http://sg.org/v1"), Iri("http://sg.org/has_ref_genome"), Literal("G")),
    ]
    text = serialize_turtle(triples, prefixes)
    assert "ns1:has_pos 7" in text
    assert set(parse_turtle(text)) == set(triples)


def test_turtle_rejects_named_graphs():
    q = Quad(Iri("http://s"), Iri("http://p"), Literal("x"), Iri("http://g"))
    with pytest.raises(RdfError):
        serialize_turtle([q])
