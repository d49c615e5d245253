"""Canned queries used by the fetch and accession-listing flows."""

from __future__ import annotations

from .rdf import Iri
from .vocab import graph_iri

# Feature-extraction query. The FILTER list placeholder is substituted with
# the accession graph IRIs before parsing; one row per variant with OPTIONAL
# columns null when the source file lacked them.
FEATURE_QUERY_TEMPLATE = """\
PREFIX sg_biohackathon:<http://biohackathon.org/resource/faldo#>
PREFIX sg_variant:<sg://0.99.11/vcf2rdf/>
PREFIX sg_vcf:<sg://0.99.11/vcf2rdf/variant/>
PREFIX sg_info:<sg://0.99.11/vcf2rdf/info/>
PREFIX sg_format:<sg://0.99.11/vcf2rdf/format/>
PREFIX sg_format_gt:<sg://0.99.11/vcf2rdf/format/GT/>
PREFIX ns1:<http://sg.org/>

SELECT DISTINCT ?accession_id ?origin (COALESCE(?variant_id, "None") AS ?variant_id) ?chromosome ?position ?ref_genome ?alt_genome ?quality ?ann ?ann_split_1 ?filter_status ?allele_count ?allele_frequency ?total_number_of_alleles ?baseqranksum ?depth ?excesshet ?fs ?mleac ?mleaf ?RMS_mapping_quality ?qd ?readposranksum ?sor ?combined_depth ?conditional_genotype_quality ?genotype ?raw_score ?phred_score
WHERE {
  GRAPH ?accession_id {
    OPTIONAL { ?origin sg_variant:variantId ?variant_id . }
    BIND (COALESCE(?variant_id, "None") AS ?variant_id)
    ?origin sg_biohackathon:reference ?chromosome .
    ?origin sg_biohackathon:position ?position .
    ?origin sg_vcf:REF ?ref_genome .
    ?origin sg_vcf:ALT ?alt_genome .
    ?origin sg_vcf:QUAL ?quality .
    ?origin sg_info:ANN ?ann .
    BIND (IF(STRLEN(?ann) - STRLEN(REPLACE(?ann, ",", "")) = 0, ?ann, STRBEFORE(?ann, ",")) AS ?ann_split_1)
    OPTIONAL { ?origin sg_info:FILTER_STATUS ?filter_status . }
    OPTIONAL { ?origin sg_info:ALLELE_COUNT ?allele_count . }
    OPTIONAL { ?origin sg_info:ALLELE_FREQUENCY ?allele_frequency . }
    OPTIONAL { ?origin sg_info:TOTAL_NUMBER_OF_ALLELES ?total_number_of_alleles . }
    OPTIONAL { ?origin sg_info:BASEQRANKSUM ?baseqranksum . }
    OPTIONAL { ?origin sg_info:DEPTH ?depth . }
    OPTIONAL { ?origin sg_info:EXCESSHET ?excesshet . }
    OPTIONAL { ?origin sg_info:FS ?fs . }
    OPTIONAL { ?origin sg_info:MLEAC ?mleac . }
    OPTIONAL { ?origin sg_info:MLEAF ?mleaf . }
    OPTIONAL { ?origin sg_info:RMS_MAPPING_QUALITY ?RMS_mapping_quality . }
    OPTIONAL { ?origin sg_info:QD ?qd . }
    OPTIONAL { ?origin sg_info:READPOSRANKSUM ?readposranksum . }
    OPTIONAL { ?origin sg_info:SOR ?sor . }
    OPTIONAL { ?origin sg_info:COMBINED_DEPTH ?combined_depth . }
    OPTIONAL { ?origin sg_info:CONDITIONAL_GENOTYPE_QUALITY ?conditional_genotype_quality . }
    OPTIONAL { ?origin sg_info:GENOTYPE ?genotype . }
    OPTIONAL { ?origin sg_info:RAW_SCORE ?raw_score . }
    OPTIONAL { ?origin sg_info:PHRED_SCORE ?phred_score . }
  }
  ?origin sg_biohackathon:position ?position .
  OPTIONAL { ?variant <http://sg.org/has_pos> ?position . }
  ?origin sg_vcf:REF ?ref_genome .
  OPTIONAL { ?variant <http://sg.org/has_ref_genome> ?ref_genome . }
  ?origin sg_vcf:ALT ?alt_genome .
  OPTIONAL { ?variant <http://sg.org/has_alt_genome> ?alt_genome . }
  OPTIONAL { ?variant <http://sg.org/has_cadd_scores> ?cadd_scores . }
  OPTIONAL { ?cadd_scores <http://sg.org/has_raw_score> ?raw_score . }
  OPTIONAL { ?cadd_scores <http://sg.org/has_phred> ?phred_score . }
  FILTER (?accession_id IN (accession_id_list))
} ORDER BY ?variant_id
"""

# columns of the feature query, in projection order
FEATURE_COLUMNS = [
    "accession_id", "origin", "variant_id", "chromosome", "position",
    "ref_genome", "alt_genome", "quality", "ann", "ann_split_1",
    "filter_status", "allele_count", "allele_frequency",
    "total_number_of_alleles", "baseqranksum", "depth", "excesshet", "fs",
    "mleac", "mleaf", "RMS_mapping_quality", "qd", "readposranksum", "sor",
    "combined_depth", "conditional_genotype_quality", "genotype",
    "raw_score", "phred_score",
]


def feature_query(accessions: list[str]) -> str:
    if not accessions:
        raise ValueError("at least one accession required")
    iris = ", ".join(f"<{graph_iri(a).value}>" for a in accessions)
    return FEATURE_QUERY_TEMPLATE.replace("accession_id_list", iris)


AGE_PREDICATE_IRI = "https://www.wikidata.org/wiki/Q11904283"


def accessions_by_age_query(min_age: float | None, max_age: float | None) -> str:
    """Accession graphs whose patient age lies in [min_age, max_age)."""
    conditions = []
    if min_age is not None:
        conditions.append(f"?age >= {min_age}")
    if max_age is not None:
        conditions.append(f"?age < {max_age}")
    filter_line = f"  FILTER ({' && '.join(conditions)})\n" if conditions else ""
    return (
        "SELECT DISTINCT ?accession_id\n"
        "WHERE {\n"
        f"  GRAPH ?accession_id {{ ?s <{AGE_PREDICATE_IRI}> ?age . }}\n"
        f"{filter_line}"
        "}\n"
    )


def graph_term(accession: str) -> Iri:
    return graph_iri(accession)
