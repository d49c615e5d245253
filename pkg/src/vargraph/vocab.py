"""Fixed RDF vocabulary used by the conversion pipeline.

Namespaces: FALDO for genomic coordinates, the vcf2rdf sg:// scheme for
variant-level predicates, and http://sg.org/ for the CADD score ontology.
"""

from __future__ import annotations

from .rdf import RDF_TYPE, Iri

FALDO_NS = "http://biohackathon.org/resource/faldo#"
FALDO_REFERENCE = Iri(FALDO_NS + "reference")
FALDO_POSITION = Iri(FALDO_NS + "position")

VCF2RDF_ROOT = "sg://0.99.11/vcf2rdf/"
PRED_REF = Iri(VCF2RDF_ROOT + "variant/REF")
PRED_ALT = Iri(VCF2RDF_ROOT + "variant/ALT")
PRED_QUAL = Iri(VCF2RDF_ROOT + "variant/QUAL")
PRED_FILTER = Iri(VCF2RDF_ROOT + "variant/FILTER")
PRED_VARIANT_ID = Iri(VCF2RDF_ROOT + "variantId")

CADD_NS = "http://sg.org/"
CLASS_VARIANT = Iri(CADD_NS + "variant")
HAS_POS = Iri(CADD_NS + "has_pos")
HAS_REF_GENOME = Iri(CADD_NS + "has_ref_genome")
HAS_ALT_GENOME = Iri(CADD_NS + "has_alt_genome")
HAS_CADD_SCORES = Iri(CADD_NS + "has_cadd_scores")
HAS_RAW_SCORE = Iri(CADD_NS + "has_raw_score")
HAS_PHRED = Iri(CADD_NS + "has_phred")
HAS_CHROMOSOME_NUMBER = Iri(CADD_NS + "has_chromosome_number")
HAS_VARIANT = Iri(CADD_NS + "has_variant")
HAS_VARIANT_ID = Iri(CADD_NS + "has_variant_id")
# alternate property spellings used by the ontology tables; the emitters use
# the has_-prefixed forms, these are registered for query authors
RAW_SCORE = Iri(CADD_NS + "raw_score")
PHRED = Iri(CADD_NS + "phred")

HAS_SEX = Iri(CADD_NS + "has_sex")
HAS_DISEASE = Iri(CADD_NS + "has_disease")
HAS_FATALITY_STATUS = Iri(CADD_NS + "has_fatality_status")

AGE_PREDICATE = Iri("https://www.wikidata.org/wiki/Q11904283")

TYPE = Iri(RDF_TYPE)

# INFO keys renamed to the long predicate names the feature query expects
INFO_ALIASES = {
    "AC": "ALLELE_COUNT",
    "AF": "ALLELE_FREQUENCY",
    "AN": "TOTAL_NUMBER_OF_ALLELES",
    "MQ": "RMS_MAPPING_QUALITY",
}
FORMAT_ALIASES = {
    "DP": "COMBINED_DEPTH",
    "GQ": "CONDITIONAL_GENOTYPE_QUALITY",
    "GT": "GENOTYPE",
}
FILTER_STATUS_KEY = "FILTER_STATUS"
RAW_SCORE_KEY = "RAW_SCORE"
PHRED_SCORE_KEY = "PHRED_SCORE"


def graph_iri(accession: str) -> Iri:
    return Iri("sg://" + accession)


def accession_of_graph(graph: Iri) -> str | None:
    return graph.value[5:] if graph.value.startswith("sg://") else None


def sra_subject(accession: str) -> Iri:
    return Iri("https://www.ncbi.nlm.nih.gov/sra/?term=" + accession)


def chromosome_iri(chrom: str) -> Iri:
    return Iri(VCF2RDF_ROOT + "chromosome/" + chrom)


def sequence_iri(sequence: str) -> Iri:
    return Iri(VCF2RDF_ROOT + "sequence/" + sequence)


def info_predicate(key: str) -> Iri:
    return Iri(VCF2RDF_ROOT + "info/" + key)


def format_predicate(key: str) -> Iri:
    return Iri(VCF2RDF_ROOT + "format/" + key)


def all_constants() -> list[Iri]:
    """Every fixed IRI constant (used to assert uniqueness)."""
    return [
        FALDO_REFERENCE, FALDO_POSITION, PRED_REF, PRED_ALT, PRED_QUAL,
        PRED_FILTER, PRED_VARIANT_ID, CLASS_VARIANT, HAS_POS, HAS_REF_GENOME,
        HAS_ALT_GENOME, HAS_CADD_SCORES, HAS_RAW_SCORE, HAS_PHRED,
        HAS_CHROMOSOME_NUMBER, HAS_VARIANT, HAS_VARIANT_ID, RAW_SCORE, PHRED,
        HAS_SEX, HAS_DISEASE, HAS_FATALITY_STATUS, AGE_PREDICATE, TYPE,
    ]
