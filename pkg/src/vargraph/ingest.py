"""Streaming parsers for annotated VCF, CADD TSV, and run-metadata CSV.

All three parsers read UTF-8 text (VCF optionally gzip-compressed) and yield
one record per data line, holding at most one record in memory at a time.
"""

from __future__ import annotations

import csv
import gzip
import io
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

log = logging.getLogger(__name__)

_AGE_TOKEN = re.compile(r"^\s*([0-9]+(?:\.[0-9]+)?)")


class IngestError(ValueError):
    """Fatal file-shape problem (e.g. missing mandatory header)."""


class RecordError(IngestError):
    """One malformed data line; carries its 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, slots=True)
class VcfRecord:
    chrom: str
    pos: int
    id: str | None
    ref: str
    alt: tuple[str, ...]
    qual: float | None
    filter: str | None
    info: dict[str, str | bool]
    format_keys: tuple[str, ...] | None = None
    samples: tuple[tuple[str, ...], ...] | None = None

    @property
    def alt_joined(self) -> str:
        return ",".join(self.alt)


@dataclass(frozen=True, slots=True)
class AnnAnnotation:
    """One SnpEff functional annotation (pipe-delimited ANN segment)."""

    allele: str
    annotation_effect: str
    putative_impact: str
    gene_name: str
    gene_id: str
    remaining_fields: tuple[str, ...] = ()

    def raw(self) -> str:
        """Rejoin to the original pipe-delimited segment."""
        return "|".join(
            (self.allele, self.annotation_effect, self.putative_impact,
             self.gene_name, self.gene_id) + self.remaining_fields
        )


@dataclass(frozen=True, slots=True)
class CaddRecord:
    chrom: str
    pos: int
    ref: str
    alt: str
    raw_score: float
    phred: float


@dataclass(frozen=True, slots=True)
class PatientMetadata:
    accession_id: str
    age: float | None = None
    sex: str | None = None
    disease: str | None = None
    fatality_status: str | None = None
    extra: dict[str, str] = field(default_factory=dict)


@dataclass
class VcfHeader:
    """Declarations collected from the ## header block and the #CHROM line."""

    info_types: dict[str, str] = field(default_factory=dict)
    format_types: dict[str, str] = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    sample_names: list[str] = field(default_factory=list)
    raw_lines: list[str] = field(default_factory=list)


def _as_lines(source: str | Path | IO[bytes] | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.suffix == ".gz":
            with gzip.open(path, "rt", encoding="utf-8") as fh:
                yield from fh
        else:
            with open(path, "r", encoding="utf-8") as fh:
                yield from fh
        return
    if hasattr(source, "read"):
        probe = source.read(0)
        if isinstance(probe, bytes):
            source = io.TextIOWrapper(source, encoding="utf-8")  # type: ignore[arg-type]
    yield from source  # type: ignore[misc]


_TYPE_LINE = re.compile(r"##(INFO|FORMAT)=<ID=([^,>]+)[^>]*?,Type=([^,>]+)")


def parse_vcf(
    source: str | Path | IO[bytes] | IO[str] | Iterable[str],
    *,
    on_record_error: str = "raise",
) -> tuple[VcfHeader, Iterator[VcfRecord]]:
    """Parse a VCF 4.x file into its header and a lazy record stream.

    The header is consumed eagerly (a missing #CHROM line is fatal); records
    are yielded one data line at a time.  ``on_record_error`` is ``"raise"``
    to abort on the first malformed line or ``"skip"`` to log and continue.
    """
    if on_record_error not in ("raise", "skip"):
        raise ValueError("on_record_error must be 'raise' or 'skip'")
    lines = _as_lines(source)
    header = VcfHeader()
    line_no = 0
    for line in lines:
        line_no += 1
        line = line.rstrip("\n").rstrip("\r")
        if line.startswith("##"):
            header.raw_lines.append(line)
            m = _TYPE_LINE.match(line)
            if m:
                kind, key, typ = m.groups()
                target = header.info_types if kind == "INFO" else header.format_types
                target[key] = typ
        elif line.startswith("#CHROM"):
            header.columns = line.lstrip("#").split("\t")
            if len(header.columns) > 9:
                header.sample_names = header.columns[9:]
            return header, _vcf_records(lines, header, line_no, on_record_error)
        else:
            raise IngestError(f"line {line_no}: expected header line, got {line[:40]!r}")
    raise IngestError("missing #CHROM column line")


def _vcf_records(
    lines: Iterator[str], header: VcfHeader, line_no: int, on_record_error: str
) -> Iterator[VcfRecord]:
    expected = len(header.columns)
    for line in lines:
        line_no += 1
        line = line.rstrip("\n").rstrip("\r")
        if not line:
            continue
        try:
            yield _parse_vcf_line(line, expected, line_no)
        except RecordError:
            if on_record_error == "raise":
                raise
            log.warning("skipping malformed VCF line %d", line_no)


def _parse_vcf_line(line: str, expected_cols: int, line_no: int) -> VcfRecord:
    fields = line.split("\t")
    if len(fields) != expected_cols:
        raise RecordError(
            f"expected {expected_cols} columns, found {len(fields)}", line_no
        )
    chrom, pos_text, vid, ref, alt, qual_text, filt = fields[:7]
    try:
        pos = int(pos_text)
    except ValueError:
        raise RecordError(f"non-integer POS {pos_text!r}", line_no) from None
    if pos < 1:
        raise RecordError(f"POS must be >= 1, got {pos}", line_no)
    if not ref:
        raise RecordError("empty REF", line_no)
    alts = tuple(alt.split(","))
    if any(not a for a in alts):
        raise RecordError("empty ALT allele", line_no)
    qual = None
    if qual_text != ".":
        try:
            qual = float(qual_text)
        except ValueError:
            raise RecordError(f"non-numeric QUAL {qual_text!r}", line_no) from None

    info: dict[str, str | bool] = {}
    if fields[7] != ".":
        for token in fields[7].split(";"):
            if not token:
                continue
            key, eq, value = token.partition("=")
            if key in info:
                raise RecordError(f"duplicate INFO key {key!r}", line_no)
            info[key] = value if eq else True

    format_keys = None
    samples = None
    if expected_cols > 8:
        format_keys = tuple(fields[8].split(":"))
        samples = tuple(tuple(s.split(":")) for s in fields[9:])
        for i, sample in enumerate(samples):
            if len(sample) != len(format_keys):
                raise RecordError(
                    f"sample {i} has {len(sample)} values for {len(format_keys)} FORMAT keys",
                    line_no,
                )
    return VcfRecord(
        chrom=chrom,
        pos=pos,
        id=None if vid == "." else vid,
        ref=ref,
        alt=alts,
        qual=qual,
        filter=None if filt == "." else filt,
        info=info,
        format_keys=format_keys,
        samples=samples,
    )


def parse_ann_field(raw: str) -> list[AnnAnnotation]:
    """Split an INFO ANN value into its comma-separated annotation entries."""
    annotations = []
    for index, segment in enumerate(raw.split(",")):
        parts = segment.split("|")
        if len(parts) < 5:
            raise IngestError(
                f"ANN segment {index} has {len(parts)} pipe fields, need at least 5"
            )
        annotations.append(
            AnnAnnotation(
                allele=parts[0],
                annotation_effect=parts[1],
                putative_impact=parts[2],
                gene_name=parts[3],
                gene_id=parts[4],
                remaining_fields=tuple(parts[5:]),
            )
        )
    return annotations


def parse_cadd_tsv(
    source: str | Path | IO[bytes] | IO[str] | Iterable[str],
) -> Iterator[CaddRecord]:
    """Parse a CADD score TSV; ## comment lines are skipped."""
    lines = _as_lines(source)
    line_no = 0
    saw_header = False
    for line in lines:
        line_no += 1
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("##"):
            continue
        if not saw_header:
            if not line.startswith("#Chrom"):
                raise IngestError(
                    f"line {line_no}: expected '#Chrom' header, got {line[:40]!r}"
                )
            saw_header = True
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise RecordError(f"expected 6 columns, found {len(fields)}", line_no)
        chrom, pos_text, ref, alt, raw_text, phred_text = fields
        try:
            pos = int(pos_text)
        except ValueError:
            raise RecordError(f"non-integer Pos {pos_text!r}", line_no) from None
        try:
            raw_score = float(raw_text)
            phred = float(phred_text)
        except ValueError:
            raise RecordError("non-numeric RawScore/PHRED", line_no) from None
        if pos < 1 or phred < 0:
            raise RecordError("Pos must be >= 1 and PHRED >= 0", line_no)
        yield CaddRecord(chrom, pos, ref, alt, raw_score, phred)
    if not saw_header:
        raise IngestError("missing '#Chrom' header line")


@dataclass(frozen=True)
class MetadataColumns:
    """Column positions (0-based index, or header name when has_header).

    Defaults follow the SRA run-table layout: accession first, age second,
    disease/fatality in the GEO block, sex near the library description.
    """

    accession: int | str = 0
    age: int | str = 1
    disease: int | str = 11
    fatality: int | str = 12
    sex: int | str = 31
    has_header: bool = False


def parse_metadata_csv(
    source: str | Path | IO[bytes] | IO[str] | Iterable[str],
    columns: MetadataColumns | None = None,
    warnings: list[str] | None = None,
) -> Iterator[PatientMetadata]:
    """Parse run-metadata CSV rows into PatientMetadata values.

    Age cells may carry trailing annotations ("65 (Age)"); the leading numeric
    token is used.  Rows with an empty accession are skipped with a warning.
    """
    cols = columns or MetadataColumns()
    reader = csv.reader(_as_lines(source))
    header_names: list[str] | None = None
    for row_no, row in enumerate(reader, start=1):
        if not row:
            continue
        if cols.has_header and header_names is None:
            header_names = row
            continue

        def cell(which: int | str) -> str:
            if isinstance(which, str):
                if header_names is None or which not in header_names:
                    return ""
                which = header_names.index(which)
            return row[which].strip() if which < len(row) else ""

        accession = cell(cols.accession)
        if not accession:
            _warn(warnings, f"row {row_no}: empty accession, skipped")
            continue
        age = None
        age_text = cell(cols.age)
        if age_text:
            m = _AGE_TOKEN.match(age_text)
            if m:
                age = float(m.group(1))
                if not 0 <= age <= 150:
                    _warn(warnings, f"row {row_no}: age {age} out of range, dropped")
                    age = None
            else:
                _warn(warnings, f"row {row_no}: unparseable age {age_text!r}")
        if header_names is not None:
            extra = {name: row[i] if i < len(row) else "" for i, name in enumerate(header_names)}
        else:
            extra = {f"col{i}": value for i, value in enumerate(row)}
        yield PatientMetadata(
            accession_id=accession,
            age=age,
            sex=cell(cols.sex) or None,
            disease=cell(cols.disease) or None,
            fatality_status=cell(cols.fatality) or None,
            extra=extra,
        )


def _warn(sink: list[str] | None, message: str) -> None:
    log.warning("%s", message)
    if sink is not None:
        sink.append(message)
