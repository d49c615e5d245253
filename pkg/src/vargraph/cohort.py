"""Synthetic cohort files (VCF + CADD TSV + metadata CSV) for demos and tests.

Every variant carries an id, QUAL, ANN annotation, and a matching CADD row,
so the feature query yields a fully populated table.  Phred scores sit in a
per-gene band and QUAL tracks them, so phred-binned labels are learnable from
the quality feature and the gene-clique structure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

GENES = [f"GENE{i}" for i in range(6)]
EFFECTS = ["missense_variant", "synonymous_variant", "upstream_gene_variant"]
IMPACTS = ["HIGH", "MODERATE", "LOW", "MODIFIER"]

VCF_HEADER = """##fileformat=VCFv4.2
##INFO=<ID=AC,Number=A,Type=Integer,Description="Allele count">
##INFO=<ID=AF,Number=A,Type=Float,Description="Allele frequency">
##INFO=<ID=AN,Number=1,Type=Integer,Description="Total alleles">
##INFO=<ID=MQ,Number=1,Type=Float,Description="RMS mapping quality">
##INFO=<ID=QD,Number=1,Type=Float,Description="Quality by depth">
##INFO=<ID=ANN,Number=.,Type=String,Description="Functional annotations: 'Allele | Annotation | Impact | Gene_Name | Gene_ID'">
#CHROM\tPOS\tID\tREF\tALT\tQUAL\tFILTER\tINFO
"""

CADD_HEADER = "## synthetic CADD scores\n#Chrom\tPos\tRef\tAlt\tRawScore\tPHRED\n"


@dataclass
class CohortManifest:
    accessions: list[str] = field(default_factory=list)
    ages: dict[str, float] = field(default_factory=dict)
    variant_counts: dict[str, int] = field(default_factory=dict)
    vcf_paths: list[Path] = field(default_factory=list)
    cadd_paths: list[Path] = field(default_factory=list)
    metadata_path: Path | None = None

    @property
    def total_variants(self) -> int:
        return sum(self.variant_counts.values())


def make_cohort(
    directory: str | Path,
    n_accessions: int = 5,
    variants_per_accession: int = 40,
    seed: int = 0,
) -> CohortManifest:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    manifest = CohortManifest()

    metadata_rows = []
    for k in range(n_accessions):
        accession = f"SRR{900000 + seed * 100 + k}"
        manifest.accessions.append(accession)
        age = float(40 + 5 * k)
        manifest.ages[accession] = age
        metadata_rows.append(
            f"{accession},{age:g} (Age),,RNA-Seq,,,,,,,GEO,Severe COVID,"
            f"{'Alive' if k % 2 == 0 else 'Deceased'},public"
            + "," * 17 + rng.choice(["male", "female"]) + "," * 8
        )

        vcf_lines = [VCF_HEADER]
        cadd_lines = [CADD_HEADER]
        positions = rng.sample(range(1000, 2_000_000), variants_per_accession)
        positions.sort()
        for i, pos in enumerate(positions):
            chrom = rng.choice(["1", "2", "3"])
            ref = rng.choice("ACGT")
            alt = rng.choice([b for b in "ACGT" if b != ref])
            gene_index = rng.randrange(len(GENES))
            gene = GENES[gene_index]
            # deleteriousness band per gene, QUAL tracks it
            phred = round(min(39.9, max(0.0, 3.0 + 6.5 * gene_index
                                        + rng.gauss(0, 2.0))), 2)
            qual = round(max(1.0, 15.0 + 1.5 * phred + rng.gauss(0, 4.0)), 2)
            ann = "|".join([
                alt, rng.choice(EFFECTS), rng.choice(IMPACTS), gene,
                f"{gene}_ID", "transcript", f"T{i}", "protein_coding",
            ])
            info = (
                f"AC={rng.randint(1, 2)};AF={rng.choice(['0.500', '1.00'])};"
                f"AN=2;MQ={round(rng.uniform(20, 60), 2)};"
                f"QD={round(rng.uniform(1, 30), 2)};ANN={ann}"
            )
            vcf_lines.append(
                f"{chrom}\t{pos}\trs{seed}{k}{i}\t{ref}\t{alt}\t{qual}\tPASS\t{info}\n"
            )
            raw = round(rng.uniform(-2, 8), 6)
            cadd_lines.append(f"{chrom}\t{pos}\t{ref}\t{alt}\t{raw}\t{phred}\n")

        vcf_path = directory / f"{accession}.vcf"
        vcf_path.write_text("".join(vcf_lines), encoding="utf-8")
        cadd_path = directory / f"{accession}.cadd.tsv"
        cadd_path.write_text("".join(cadd_lines), encoding="utf-8")
        manifest.vcf_paths.append(vcf_path)
        manifest.cadd_paths.append(cadd_path)
        manifest.variant_counts[accession] = variants_per_accession

    metadata_path = directory / "metadata.csv"
    metadata_path.write_text("\n".join(metadata_rows) + "\n", encoding="utf-8")
    manifest.metadata_path = metadata_path
    return manifest
