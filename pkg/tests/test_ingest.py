"""Parser tests: reference rows, independent splitting oracles, streaming."""

import gzip
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vargraph.ingest import (
    IngestError,
    MetadataColumns,
    RecordError,
    parse_ann_field,
    parse_cadd_tsv,
    parse_metadata_csv,
    parse_vcf,
)

VCF_HEADER = """##fileformat=VCFv4.2
##INFO=<ID=AC,Number=A,Type=Integer,Description="Allele count">
##INFO=<ID=AF,Number=A,Type=Float,Description="Allele frequency">
##INFO=<ID=DB,Number=0,Type=Flag,Description="dbSNP membership">
##INFO=<ID=ANN,Number=.,Type=String,Description="Functional annotations: 'Allele | Annotation | ...'">
##FORMAT=<ID=GT,Number=1,Type=String,Description="Genotype">
##FORMAT=<ID=DP,Number=1,Type=Integer,Description="Depth">
#CHROM\tPOS\tID\tREF\tALT\tQUAL\tFILTER\tINFO\tFORMAT\tS1
"""

REFERENCE_LINE = (
    "1\t16963\t.\tG\tA\t45.64\tSnpCluster\t"
    "AC=1;AF=0.500;AN=2;BaseQRankSum=1.465;DP=8;MQ=60.00\tGT:DP\t0/1:8\n"
)


def test_parse_reference_vcf_line():
    header, records = parse_vcf(io.StringIO(VCF_HEADER + REFERENCE_LINE))
    (rec,) = list(records)
    assert rec.chrom == "1"
    assert rec.pos == 16963
    assert rec.id is None
    assert rec.ref == "G"
    assert rec.alt == ("A",)
    assert rec.qual == 45.64
    assert rec.filter == "SnpCluster"
    assert rec.info["AC"] == "1"
    assert rec.info["AF"] == "0.500"
    assert header.info_types["AC"] == "Integer"
    assert header.info_types["AF"] == "Float"
    assert header.format_types["GT"] == "String"
    assert header.sample_names == ["S1"]


def test_header_only_vcf_yields_no_records():
    header, records = parse_vcf(io.StringIO(VCF_HEADER))
    assert list(records) == []
    assert header.columns[0] == "CHROM"


def test_missing_chrom_line_is_fatal():
    with pytest.raises(IngestError, match="#CHROM"):
        parse_vcf(io.StringIO("##fileformat=VCFv4.2\n"))


def test_flag_info_key_parses_to_true():
    _, records = parse_vcf(
        io.StringIO(VCF_HEADER + "1\t5\trs1\tG\tA\t.\t.\tDB;AC=2\tGT:DP\t0/1:3\n")
    )
    (rec,) = list(records)
    assert rec.info["DB"] is True
    assert rec.qual is None
    assert rec.filter is None
    assert rec.id == "rs1"


def test_multiallelic_alt_kept_as_list():
    _, records = parse_vcf(
        io.StringIO(VCF_HEADER + "2\t9\t.\tC\tA,T\t1\t.\tAC=1\tGT:DP\t0/1:3\n")
    )
    (rec,) = list(records)
    assert rec.alt == ("A", "T")
    assert rec.alt_joined == "A,T"


@pytest.mark.parametrize(
    "line,err",
    [
        ("1\t5\t.\tG\tA\t1\t.\tAC=1\n", "columns"),
        ("1\txx\t.\tG\tA\t1\t.\tAC=1\tGT:DP\t0/1:3\n", "POS"),
        ("1\t5\t.\tG\tA\t1\t.\tAC=1;AC=2\tGT:DP\t0/1:3\n", "duplicate INFO"),
        ("1\t5\t.\tG\tA\t1\t.\tAC=1\tGT:DP\t0/1\n", "FORMAT keys"),
    ],
)
def test_record_level_errors_carry_line_numbers(line, err):
    _, records = parse_vcf(io.StringIO(VCF_HEADER + line))
    with pytest.raises(RecordError, match=err) as exc_info:
        list(records)
    assert exc_info.value.line == 9


def test_skip_mode_drops_bad_lines():
    body = "1\t5\t.\tG\tA\t1\t.\tAC=1\tGT:DP\t0/1:3\n" + "bad line\n"
    _, records = parse_vcf(io.StringIO(VCF_HEADER + body), on_record_error="skip")
    assert len(list(records)) == 1


def test_gzip_input(tmp_path):
    path = tmp_path / "sample.vcf.gz"
    with gzip.open(path, "wt", encoding="utf-8") as fh:
        fh.write(VCF_HEADER + REFERENCE_LINE)
    _, records = parse_vcf(path)
    assert len(list(records)) == 1


def test_parsing_is_streaming():
    consumed = 0

    def lines():
        nonlocal consumed
        for raw in (VCF_HEADER + REFERENCE_LINE * 10_000).splitlines(keepends=True):
            consumed += 1
            yield raw

    _, records = parse_vcf(lines())
    next(records)
    # only the header block plus a line or two may have been consumed
    assert consumed <= 12


def test_synthetic_vcf_matches_line_splitting_oracle():
    rng = random.Random(7)
    body_lines = []
    oracle = []
    for i in range(10_000):
        chrom = rng.choice(["1", "2", "X", "MT"])
        pos = rng.randint(1, 10**8)
        oracle.append((chrom, pos))
        body_lines.append(f"{chrom}\t{pos}\t.\tG\tA\t1\t.\tAC=1\tGT:DP\t0/1:3\n")
    _, records = parse_vcf(io.StringIO(VCF_HEADER + "".join(body_lines)))
    parsed = [(r.chrom, r.pos) for r in records]
    assert sorted(parsed) == sorted(oracle)
    assert len(parsed) == 10_000


# --- ANN field ------------------------------------------------------------


def test_ann_single_entry():
    (ann,) = parse_ann_field("A|missense_variant|MODERATE|GENE1|ID1|x|y")
    assert ann.allele == "A"
    assert ann.gene_name == "GENE1"
    assert ann.gene_id == "ID1"
    assert ann.remaining_fields == ("x", "y")


def test_ann_preserves_entry_order_and_empty_tokens():
    anns = parse_ann_field("A|e1|HIGH|G1|I1|," + "T|e2|LOW|G2|I2||rank")
    assert [a.allele for a in anns] == ["A", "T"]
    assert anns[0].remaining_fields == ("",)


def test_ann_too_few_fields():
    with pytest.raises(IngestError, match="segment 1"):
        parse_ann_field("A|e|i|g|id,B|e|i")


_ann_field = st.text(alphabet="ACGTxyz_0123456789.", max_size=8)


@settings(max_examples=500, deadline=None)
@given(st.lists(st.lists(_ann_field, min_size=5, max_size=12), min_size=1, max_size=5))
def test_ann_roundtrip_against_join_oracle(segments):
    raw = ",".join("|".join(fields) for fields in segments)
    parsed = parse_ann_field(raw)
    assert ",".join(a.raw() for a in parsed) == raw
    assert len(parsed) == len(segments)


# --- CADD TSV ---------------------------------------------------------------

CADD_TEXT = (
    "## CADD GRCh37-v1.6\n"
    "#Chrom\tPos\tRef\tAlt\tRawScore\tPHRED\n"
    "1\t16963\tG\tA\t0.900784\t12.72\n"
)


def test_parse_reference_cadd_row():
    (rec,) = list(parse_cadd_tsv(io.StringIO(CADD_TEXT)))
    assert rec == rec.__class__("1", 16963, "G", "A", 0.900784, 12.72)


def test_cadd_header_only():
    assert list(parse_cadd_tsv(io.StringIO("#Chrom\tPos\tRef\tAlt\tRawScore\tPHRED\n"))) == []


def test_cadd_missing_header_fatal():
    with pytest.raises(IngestError, match="#Chrom"):
        list(parse_cadd_tsv(io.StringIO("1\t2\tG\tA\t0.5\t1.0\n")))


def test_cadd_non_numeric_score():
    with pytest.raises(RecordError, match="line 3"):
        list(parse_cadd_tsv(io.StringIO(
            "#Chrom\tPos\tRef\tAlt\tRawScore\tPHRED\n1\t2\tG\tA\t0.5\t1.0\n1\t3\tG\tA\tbad\t1.0\n"
        )))


def test_cadd_synthetic_rows_match_tab_splitter_oracle():
    rng = random.Random(3)
    rows = []
    for _ in range(1000):
        rows.append((
            rng.choice(["1", "2", "22", "X"]),
            rng.randint(1, 10**7),
            rng.choice("ACGT"),
            rng.choice("ACGT"),
            round(rng.uniform(-3, 8), 6),
            round(rng.uniform(0, 60), 2),
        ))
    text = "#Chrom\tPos\tRef\tAlt\tRawScore\tPHRED\n" + "".join(
        "\t".join(str(v) for v in row) + "\n" for row in rows
    )
    parsed = list(parse_cadd_tsv(io.StringIO(text)))
    # oracle: naive tab split of the same text
    naive = [line.split("\t") for line in text.splitlines()[1:]]
    assert len(parsed) == len(naive)
    for rec, cells in zip(parsed, naive):
        assert (rec.chrom, str(rec.pos), rec.ref, rec.alt) == tuple(cells[:4])
        assert rec.raw_score == float(cells[4])
        assert rec.phred == float(cells[5])


# --- metadata CSV -----------------------------------------------------------

SRA_ROW = (
    'SRR12570493,65 (Age),,RNA-Seq,119,1473875214,PRJNA661032,SAMN15967295,'
    '582422941,,GEO,Severe COVID,Alive,public,"fastq,sra,run.zq","gs,ncbi,s3",'
    '"s3.us-east-1,gs.US,ncbi.public",SRX9058173,NextSeq 500,GSM4762164,,PAIRED,'
    'cDNA,Homo sapiens,TRANSCRIPTOMIC,ILLUMINA,2021-01-27T00:00:00Z,,'
    '2020-09-02T12:06:00Z,1,GSM4762164,male,6,Patient 14 blood,SRP279746,'
    'Patient 14,Blood,,,,,,,,,,,,\n'
)


def test_parse_reference_metadata_row():
    (meta,) = list(parse_metadata_csv(io.StringIO(SRA_ROW)))
    assert meta.accession_id == "SRR12570493"
    assert meta.age == 65.0
    assert meta.sex == "male"
    assert meta.disease == "Severe COVID"
    assert meta.fatality_status == "Alive"
    # quoted list cell preserved as one value
    assert meta.extra["col14"] == "fastq,sra,run.zq"


def test_metadata_missing_age():
    row = "SRR1,,,,,,,,,,,flu,Alive\n"
    (meta,) = list(parse_metadata_csv(io.StringIO(row)))
    assert meta.age is None
    assert meta.disease == "flu"


def test_metadata_unparseable_age_warns():
    warnings: list[str] = []
    row = "SRR1,unknown,,,,,,,,,,,\n"
    (meta,) = list(parse_metadata_csv(io.StringIO(row), warnings=warnings))
    assert meta.age is None
    assert any("unparseable age" in w for w in warnings)


def test_metadata_empty_accession_skipped():
    warnings: list[str] = []
    rows = ",65,,,,\nSRR2,40,,,,\n"
    metas = list(parse_metadata_csv(io.StringIO(rows), warnings=warnings))
    assert [m.accession_id for m in metas] == ["SRR2"]
    assert any("empty accession" in w for w in warnings)


def test_metadata_header_name_mapping():
    text = "run,years,illness\nSRR9,33,cold\n"
    cols = MetadataColumns(accession="run", age="years", disease="illness", has_header=True)
    (meta,) = list(parse_metadata_csv(io.StringIO(text), cols))
    assert meta.accession_id == "SRR9"
    assert meta.age == 33.0
    assert meta.disease == "cold"
    assert meta.extra == {"run": "SRR9", "years": "33", "illness": "cold"}
