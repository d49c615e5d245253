"""Converters from parsed variant files to RDF.

VCF records become quads in the per-accession named graph sg://<accession>;
CADD scores become default-graph Turtle triples under the http://sg.org/
ontology; run metadata becomes named-graph quads keyed by the same accession.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import vocab
from .ingest import CaddRecord, PatientMetadata, VcfHeader, VcfRecord
from .rdf import (
    XSD_BOOLEAN,
    XSD_DOUBLE,
    XSD_FLOAT,
    XSD_INTEGER,
    Iri,
    Literal,
    Quad,
)

_ORIGIN_RE = re.compile(r"^origin://([0-9a-f]{32})@([0-9]+)$")


@dataclass(frozen=True, slots=True)
class OriginId:
    """Stable per-variant identifier rendered as origin://<hash>@<ordinal>."""

    hash: str
    ordinal: int

    def __post_init__(self):
        if not re.fullmatch(r"[0-9a-f]{32}", self.hash):
            raise ValueError("origin hash must be 32 lowercase hex characters")
        if self.ordinal < 0:
            raise ValueError("origin ordinal must be non-negative")

    def iri(self) -> Iri:
        return Iri(f"origin://{self.hash}@{self.ordinal}")

    @classmethod
    def from_iri(cls, iri: Iri) -> "OriginId":
        m = _ORIGIN_RE.match(iri.value)
        if not m:
            raise ValueError(f"not an origin IRI: {iri.value}")
        return cls(m.group(1), int(m.group(2)))


def origin_iri(accession: str, record: VcfRecord, ordinal: int) -> OriginId:
    """Digest of (accession, coordinates, alleles, ordinal); MD5 gives the
    required 128-bit / 32-hex identifier and is stable across platforms."""
    key = "\t".join(
        (accession, record.chrom, str(record.pos), record.ref,
         record.alt_joined, str(ordinal))
    )
    return OriginId(hashlib.md5(key.encode("utf-8")).hexdigest(), ordinal)


def _float_lexical(value: float) -> str:
    # repr gives the shortest round-tripping decimal for a 64-bit float
    return repr(value)


def _info_literal(key: str, value: str | bool, header: VcfHeader) -> Literal:
    if value is True:
        return Literal("true", datatype=XSD_BOOLEAN)
    typ = header.info_types.get(key)
    if typ == "Integer":
        return Literal(str(value), datatype=XSD_INTEGER)
    if typ == "Float":
        return Literal(str(value), datatype=XSD_FLOAT)
    return Literal(str(value))


def _format_literal(key: str, value: str, header: VcfHeader) -> Literal:
    typ = header.format_types.get(key)
    if typ == "Integer":
        return Literal(value, datatype=XSD_INTEGER)
    if typ == "Float":
        return Literal(value, datatype=XSD_FLOAT)
    return Literal(value)


CaddIndex = dict[tuple[str, int, str, str], CaddRecord]


def build_cadd_index(cadds: Iterable[CaddRecord]) -> CaddIndex:
    """Key CADD records by (chrom, pos, ref, alt) for score injection."""
    return {(c.chrom, c.pos, c.ref, c.alt): c for c in cadds}


def vcf_to_quads(
    records: Iterable[VcfRecord],
    header: VcfHeader,
    accession: str,
    *,
    cadd_index: CaddIndex | None = None,
    emit_format: bool = False,
) -> Iterator[Quad]:
    """Convert one file's records into quads under graph sg://<accession>.

    Per record: faldo reference/position, REF/ALT sequence IRIs, optional
    QUAL/variantId/FILTER_STATUS, one info/<KEY> quad per INFO entry (long
    alias names substituted), and RAW_SCORE/PHRED_SCORE when a matching CADD
    record is supplied.  FORMAT values (first sample) are off by default.
    """
    if not accession:
        raise ValueError("accession must be non-empty")
    graph = vocab.graph_iri(accession)
    for ordinal, rec in enumerate(records):
        origin = origin_iri(accession, rec, ordinal).iri()
        yield Quad(origin, vocab.FALDO_REFERENCE, vocab.chromosome_iri(rec.chrom), graph)
        yield Quad(origin, vocab.FALDO_POSITION, Literal(str(rec.pos), datatype=XSD_INTEGER), graph)
        yield Quad(origin, vocab.PRED_REF, vocab.sequence_iri(rec.ref), graph)
        yield Quad(origin, vocab.PRED_ALT, vocab.sequence_iri(rec.alt_joined), graph)
        if rec.qual is not None:
            yield Quad(origin, vocab.PRED_QUAL, Literal(_float_lexical(rec.qual), datatype=XSD_FLOAT), graph)
        if rec.id is not None:
            yield Quad(origin, vocab.PRED_VARIANT_ID, Literal(rec.id), graph)
        if rec.filter is not None:
            yield Quad(origin, vocab.info_predicate(vocab.FILTER_STATUS_KEY), Literal(rec.filter), graph)
        for key, value in rec.info.items():
            name = vocab.INFO_ALIASES.get(key, key)
            yield Quad(origin, vocab.info_predicate(name), _info_literal(key, value, header), graph)
        if emit_format and rec.format_keys and rec.samples:
            for key, value in zip(rec.format_keys, rec.samples[0]):
                alias = vocab.FORMAT_ALIASES.get(key)
                pred = vocab.info_predicate(alias) if alias else vocab.format_predicate(key)
                yield Quad(origin, pred, _format_literal(key, value, header), graph)
        if cadd_index:
            cadd = cadd_index.get((rec.chrom, rec.pos, rec.ref, rec.alt_joined))
            if cadd is not None:
                yield Quad(origin, vocab.info_predicate(vocab.RAW_SCORE_KEY),
                           Literal(_float_lexical(cadd.raw_score), datatype=XSD_FLOAT), graph)
                yield Quad(origin, vocab.info_predicate(vocab.PHRED_SCORE_KEY),
                           Literal(_float_lexical(cadd.phred), datatype=XSD_FLOAT), graph)


def cadd_variant_iri(accession: str, chrom: str, ordinal_in_chrom: int) -> Iri:
    return Iri(f"http://sg.org/{accession}/{chrom}/variant{ordinal_in_chrom}")


def cadd_to_triples(cadds: Iterable[CaddRecord], accession: str) -> Iterator[Quad]:
    """CADD rows to default-graph triples; variant numbering restarts at 1
    for each chromosome, in file order."""
    if not accession:
        raise ValueError("accession must be non-empty")
    counters: dict[str, int] = {}
    for rec in cadds:
        counters[rec.chrom] = counters.get(rec.chrom, 0) + 1
        variant = cadd_variant_iri(accession, rec.chrom, counters[rec.chrom])
        cadd_node = Iri(variant.value + "/cadd")
        yield Quad(variant, vocab.TYPE, vocab.CLASS_VARIANT)
        yield Quad(variant, vocab.HAS_POS, Literal(str(rec.pos), datatype=XSD_INTEGER))
        yield Quad(variant, vocab.HAS_REF_GENOME, Literal(rec.ref))
        yield Quad(variant, vocab.HAS_ALT_GENOME, Literal(rec.alt))
        yield Quad(variant, vocab.HAS_CADD_SCORES, cadd_node)
        yield Quad(cadd_node, vocab.HAS_RAW_SCORE, Literal(_float_lexical(rec.raw_score), datatype=XSD_DOUBLE))
        yield Quad(cadd_node, vocab.HAS_PHRED, Literal(_float_lexical(rec.phred), datatype=XSD_DOUBLE))


@dataclass(frozen=True)
class MetadataPredicates:
    sex: Iri = vocab.HAS_SEX
    disease: Iri = vocab.HAS_DISEASE
    fatality: Iri = vocab.HAS_FATALITY_STATUS


def metadata_to_quads(
    metas: Iterable[PatientMetadata],
    predicates: MetadataPredicates | None = None,
) -> Iterator[Quad]:
    """Patient attributes as quads in the accession's named graph; the age
    predicate is the fixed wikidata property, the rest are configurable."""
    preds = predicates or MetadataPredicates()
    for meta in metas:
        subject = vocab.sra_subject(meta.accession_id)
        graph = vocab.graph_iri(meta.accession_id)
        if meta.age is not None:
            yield Quad(subject, vocab.AGE_PREDICATE,
                       Literal(_float_lexical(meta.age), datatype=XSD_FLOAT), graph)
        if meta.sex is not None:
            yield Quad(subject, preds.sex, Literal(meta.sex), graph)
        if meta.disease is not None:
            yield Quad(subject, preds.disease, Literal(meta.disease), graph)
        if meta.fatality_status is not None:
            yield Quad(subject, preds.fatality, Literal(meta.fatality_status), graph)


def link_cadd_to_origins(store) -> list[Quad]:
    """Materialize (origin, has_cadd_scores, cadd-node) links for origin and
    CADD variants agreeing on (chrom, pos, ref, alt) within one accession.

    Optional: the feature query already joins the two shapes on position; this
    exists for consumers that want the link explicit in the graph.
    """
    chrom_prefix = vocab.VCF2RDF_ROOT + "chromosome/"
    seq_prefix = vocab.VCF2RDF_ROOT + "sequence/"

    # origin side: per accession, (chrom, pos, ref, alt) -> origin IRI
    origins: dict[str, dict[tuple[str, str, str, str], list[Iri]]] = {}
    for graph in store.list_graphs():
        accession = vocab.accession_of_graph(graph)
        if accession is None:
            continue
        per_origin: dict[Iri, dict[str, str]] = {}
        for pred, field, prefix in (
            (vocab.FALDO_REFERENCE, "chrom", chrom_prefix),
            (vocab.PRED_REF, "ref", seq_prefix),
            (vocab.PRED_ALT, "alt", seq_prefix),
        ):
            for q in store.match(None, pred, None, graph):
                if isinstance(q.object, Iri) and q.object.value.startswith(prefix):
                    per_origin.setdefault(q.subject, {})[field] = q.object.value[len(prefix):]
        for q in store.match(None, vocab.FALDO_POSITION, None, graph):
            if isinstance(q.object, Literal):
                per_origin.setdefault(q.subject, {})["pos"] = q.object.lexical
        table = origins.setdefault(accession, {})
        for origin, fields in per_origin.items():
            if len(fields) == 4:
                key = (fields["chrom"], fields["pos"], fields["ref"], fields["alt"])
                table.setdefault(key, []).append(origin)

    links: list[Quad] = []
    variant_re = re.compile(r"^http://sg\.org/([^/]+)/([^/]+)/variant[0-9]+$")
    for q in store.match(None, vocab.TYPE, vocab.CLASS_VARIANT, None):
        m = variant_re.match(q.subject.value) if isinstance(q.subject, Iri) else None
        if not m:
            continue
        accession, chrom = m.group(1), m.group(2)
        pos = ref = alt = None
        for vq in store.match(q.subject, vocab.HAS_POS, None, None):
            if isinstance(vq.object, Literal):
                pos = vq.object.lexical
        for vq in store.match(q.subject, vocab.HAS_REF_GENOME, None, None):
            if isinstance(vq.object, Literal):
                ref = vq.object.lexical
        for vq in store.match(q.subject, vocab.HAS_ALT_GENOME, None, None):
            if isinstance(vq.object, Literal):
                alt = vq.object.lexical
        if pos is None or ref is None or alt is None:
            continue
        for origin in origins.get(accession, {}).get((chrom, pos, ref, alt), []):
            links.append(Quad(origin, vocab.HAS_CADD_SCORES,
                              Iri(q.subject.value + "/cadd"), vocab.graph_iri(accession)))
    links.sort(key=lambda q: (q.subject.value, q.object.value))
    return links
