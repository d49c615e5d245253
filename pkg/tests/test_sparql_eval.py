"""Evaluator tests: hand-computed joins, expression oracles, naive-evaluator
equivalence on randomized queries and stores."""

import io
import random
from collections import Counter

import pytest

from naive_sparql import naive_evaluate
from query_gen import random_query, random_store_quads
from vargraph.convert import build_cadd_index, cadd_to_triples, metadata_to_quads, vcf_to_quads
from vargraph.ingest import CaddRecord, PatientMetadata, VcfRecord, parse_vcf
from vargraph.queries import FEATURE_COLUMNS, accessions_by_age_query, feature_query
from vargraph.rdf import XSD_FLOAT, XSD_INTEGER, Iri, Literal
from vargraph.sparql import evaluate, parse_query
from vargraph.sparql.evaluate import ExpressionError, eval_expression
from vargraph.sparql.parser import _Parser
from vargraph.store import QuadStore

VCF_TEXT = """##fileformat=VCFv4.2
##INFO=<ID=AC,Number=A,Type=Integer,Description="ac">
##INFO=<ID=ANN,Number=.,Type=String,Description="ann">
#CHROM\tPOS\tID\tREF\tALT\tQUAL\tFILTER\tINFO
1\t100\trs1\tG\tA\t50.0\tPASS\tAC=1;ANN=A|eff1|MOD|GENE1|ID1|x|y
1\t200\trs2\tC\tT\t30.0\tPASS\tAC=2;ANN=T|eff2|LOW|GENE1|ID2|x|y,T|eff3|LOW|GENE2|ID3|x|y
2\t300\trs3\tG\tC\t20.0\tPASS\tAC=1;ANN=C|eff4|HIGH|GENE2|ID4|x|y
"""


def _parse_expr(text: str):
    parser = _Parser(text)
    return parser.parse_expr()


def _store_with_accessions(load_cadd_triples=False):
    """Two accessions; only A's first variant is CADD-linked (score injection
    via info predicates; optionally also the default-graph CADD triples)."""
    store = QuadStore()
    header, records = parse_vcf(io.StringIO(VCF_TEXT))
    records = list(records)
    cadd = [CaddRecord("1", 100, "G", "A", 0.9, 12.72)]
    store.bulk_load(vcf_to_quads(records, header, "SRRA", cadd_index=build_cadd_index(cadd)))
    if load_cadd_triples:
        store.bulk_load(cadd_to_triples(cadd, "SRRA"))

    header_b, records_b = parse_vcf(io.StringIO(VCF_TEXT))
    store.bulk_load(vcf_to_quads(list(records_b)[:1], header_b, "SRRB"))
    return store


def test_distinct_graphs_query():
    store = _store_with_accessions()
    ast = parse_query("SELECT DISTINCT ?g WHERE { GRAPH ?g { ?s ?p ?o . } }")
    table = evaluate(ast, store)
    assert sorted(c.value for (c,) in table.rows) == ["sg://SRRA", "sg://SRRB"]


def test_feature_query_nulls_on_unlinked_rows():
    store = _store_with_accessions()
    ast = parse_query(feature_query(["SRRA"]))
    table = evaluate(ast, store)
    assert table.columns == FEATURE_COLUMNS
    assert len(table.rows) == 3

    raw = {row[table.column_index("variant_id")].lexical:
           row[table.column_index("raw_score")] for row in table.rows}
    assert raw["rs1"] == Literal("0.9", datatype=XSD_FLOAT)
    assert raw["rs2"] is None
    assert raw["rs3"] is None

    ann_split = {row[table.column_index("variant_id")].lexical:
                 row[table.column_index("ann_split_1")].lexical for row in table.rows}
    assert ann_split["rs1"] == "A|eff1|MOD|GENE1|ID1|x|y"
    assert ann_split["rs2"] == "T|eff2|LOW|GENE1|ID2|x|y"

    # ordered by variant_id
    ids = [row[table.column_index("variant_id")].lexical for row in table.rows]
    assert ids == sorted(ids)


def test_feature_query_cadd_path_binds_scores():
    """With default-graph CADD triples loaded, the linked row also reaches its
    scores through the has_cadd_scores path (xsd:double spelling)."""
    store = _store_with_accessions(load_cadd_triples=True)
    header, records = parse_vcf(io.StringIO(VCF_TEXT))
    store_b = QuadStore()
    store_b.bulk_load(vcf_to_quads(list(records), header, "SRRC"))
    store_b.bulk_load(cadd_to_triples([CaddRecord("1", 100, "G", "A", 0.9, 12.72)], "SRRC"))

    table = evaluate(parse_query(feature_query(["SRRC"])), store_b)
    raw = {row[table.column_index("variant_id")].lexical:
           row[table.column_index("raw_score")] for row in table.rows}
    from vargraph.rdf import XSD_DOUBLE
    assert raw["rs1"] == Literal("0.9", datatype=XSD_DOUBLE)


def test_feature_query_filter_excludes_other_accessions():
    store = _store_with_accessions()
    table = evaluate(parse_query(feature_query(["SRRB"])), store)
    assert len(table.rows) == 1
    assert table.rows[0][0] == Iri("sg://SRRB")


def test_age_filter_query():
    store = QuadStore()
    store.bulk_load(metadata_to_quads([
        PatientMetadata("S1", age=61.0),
        PatientMetadata("S2", age=65.0),
        PatientMetadata("S3", age=45.0),
    ]))
    table = evaluate(parse_query(accessions_by_age_query(60, 70)), store)
    assert sorted(g.value for (g,) in table.rows) == ["sg://S1", "sg://S2"]


def test_optional_never_reduces_left_rows():
    store = _store_with_accessions()
    base = evaluate(parse_query(
        "PREFIX f:<http://biohackathon.org/resource/faldo#>\n"
        "SELECT ?o WHERE { ?o f:position ?p . }"), store)
    with_opt = evaluate(parse_query(
        "PREFIX f:<http://biohackathon.org/resource/faldo#>\n"
        "SELECT ?o WHERE { ?o f:position ?p . OPTIONAL { ?o <http://nope> ?x . } }"), store)
    assert len(with_opt.rows) == len(base.rows)


def test_evaluate_is_read_only():
    store = _store_with_accessions()
    before = store.stats()
    evaluate(parse_query(feature_query(["SRRA"])), store)
    assert store.stats() == before


def test_order_by_places_unbound_first():
    from vargraph.rdf import Quad

    store = QuadStore()
    store.bulk_load([
        Quad(Iri("http://s1"), Iri("http://p"), Literal("b")),
        Quad(Iri("http://s2"), Iri("http://p"), Literal("a")),
        Quad(Iri("http://s3"), Iri("http://q"), Literal("z")),
    ])
    ast = parse_query(
        "SELECT ?s ?v WHERE { ?s ?any ?w . OPTIONAL { ?s <http://p> ?v . } } ORDER BY ?v"
    )
    table = evaluate(ast, store)
    values = [row[1] for row in table.rows]
    nones = [i for i, v in enumerate(values) if v is None]
    assert nones == list(range(len(nones)))
    bound = [v.lexical for v in values if v is not None]
    assert bound == sorted(bound)


# --- expression semantics ---------------------------------------------------


def test_ann_split_expression_zero_commas():
    expr = _parse_expr(
        'IF(STRLEN(?ann) - STRLEN(REPLACE(?ann, ",", "")) = 0, ?ann, STRBEFORE(?ann, ","))'
    )
    row = {"ann": Literal("A|x|y")}
    assert eval_expression(expr, row) == Literal("A|x|y")


def test_strbefore_takes_prefix():
    expr = _parse_expr('STRBEFORE(?s, ",")')
    assert eval_expression(expr, {"s": Literal("X,Y")}) == Literal("X")
    assert eval_expression(expr, {"s": Literal("XY")}) == Literal("")


def test_coalesce_returns_first_bound():
    expr = _parse_expr('COALESCE(?missing, "None")')
    assert eval_expression(expr, {}) == Literal("None")
    assert eval_expression(expr, {"missing": Literal("x")}) == Literal("x")


def test_unbound_propagates_to_error():
    with pytest.raises(ExpressionError):
        eval_expression(_parse_expr("STRLEN(?gone)"), {})


def test_numeric_comparison_across_datatypes():
    expr = _parse_expr("?age >= 60 && ?age < 70")
    assert eval_expression(expr, {"age": Literal("61.0", datatype=XSD_FLOAT)}).lexical == "true"
    assert eval_expression(expr, {"age": Literal("45.0", datatype=XSD_FLOAT)}).lexical == "false"


def test_ann_split_matches_split_oracle_on_random_strings():
    rng = random.Random(31)
    expr = _parse_expr(
        'IF(STRLEN(?ann) - STRLEN(REPLACE(?ann, ",", "")) = 0, ?ann, STRBEFORE(?ann, ","))'
    )
    alphabet = "ACGT|_abc,"
    for _ in range(1000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(1, 30)))
        got = eval_expression(expr, {"ann": Literal(text)}).lexical
        expected = text.split(",", 1)[0] if "," in text else text
        assert got == expected


# --- oracle equivalence -------------------------------------------------------


def _rows_multiset(rows):
    return Counter(tuple(rows_i) for rows_i in rows)


@pytest.mark.parametrize("seed", range(40))
def test_random_queries_match_naive_evaluator(seed):
    rng = random.Random(seed)
    quads = random_store_quads(rng, rng.randrange(50, 600))
    store = QuadStore()
    store.bulk_load(quads)
    unique_quads = list(set(quads))
    for _ in range(3):
        text = random_query(rng)
        ast = parse_query(text)
        engine_rows = evaluate(ast, store).rows
        naive_rows = naive_evaluate(ast, unique_quads)
        assert _rows_multiset(engine_rows) == _rows_multiset(naive_rows), text


def test_feature_query_matches_naive_evaluator():
    store = _store_with_accessions()
    ast = parse_query(feature_query(["SRRA", "SRRB"]))
    engine_rows = evaluate(ast, store).rows
    naive_rows = naive_evaluate(ast, list(iter(store)))
    assert _rows_multiset(engine_rows) == _rows_multiset(naive_rows)
