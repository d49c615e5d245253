"""Columnar query-result table with CSV export and a binary cache format.

The cache file stores column names, per-column null bitmaps, and N-Quads term
tokens for the non-null cells, followed by a sha256 checksum.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from ..rdf import BlankNode, Iri, Literal, Term, parse_term_token, term_token

_MAGIC = b"VKGTAB01"
_VERSION = 1


class TableFormatError(ValueError):
    pass


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple[Term | None, ...]] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise TableFormatError("row arity does not match column count")

    def __len__(self) -> int:
        return len(self.rows)

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r}; have {self.columns}") from None

    def column(self, name: str) -> list[Term | None]:
        index = self.column_index(name)
        return [row[index] for row in self.rows]

    def select(self, names: list[str]) -> "ResultTable":
        indices = [self.column_index(n) for n in names]
        return ResultTable(
            columns=list(names),
            rows=[tuple(row[i] for i in indices) for row in self.rows],
        )

    # --- CSV ----------------------------------------------------------------

    def to_csv(self, fh: IO[str]) -> None:
        """Display form: literal lexicals, bare IRIs, empty string for null."""
        writer = csv.writer(fh)
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([display_cell(cell) for cell in row])

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()

    # --- binary cache ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        digest = hashlib.sha256()
        with open(path, "wb") as fh:
            def emit(data: bytes) -> None:
                digest.update(data)
                fh.write(data)

            emit(_MAGIC)
            emit(struct.pack("<I", _VERSION))
            header = json.dumps({"columns": self.columns}, sort_keys=True).encode("utf-8")
            emit(struct.pack("<I", len(header)))
            emit(header)
            emit(struct.pack("<Q", len(self.rows)))
            for index in range(len(self.columns)):
                cells = [row[index] for row in self.rows]
                bitmap = bytearray((len(cells) + 7) // 8)
                for i, cell in enumerate(cells):
                    if cell is not None:
                        bitmap[i // 8] |= 1 << (i % 8)
                emit(bytes(bitmap))
                for cell in cells:
                    if cell is None:
                        continue
                    token = term_token(cell).encode("utf-8")
                    emit(struct.pack("<I", len(token)))
                    emit(token)
            fh.write(digest.digest())

    @classmethod
    def load(cls, path: str | Path) -> "ResultTable":
        raw = Path(path).read_bytes()
        if len(raw) < len(_MAGIC) + 8 + 32:
            raise TableFormatError("table cache truncated")
        payload, checksum = raw[:-32], raw[-32:]
        if hashlib.sha256(payload).digest() != checksum:
            raise TableFormatError("table cache checksum mismatch")
        if payload[: len(_MAGIC)] != _MAGIC:
            raise TableFormatError("not a result-table cache")
        pos = len(_MAGIC)
        (version,) = struct.unpack_from("<I", payload, pos)
        pos += 4
        if version != _VERSION:
            raise TableFormatError(f"unsupported table version {version}")
        (header_len,) = struct.unpack_from("<I", payload, pos)
        pos += 4
        header = json.loads(payload[pos:pos + header_len].decode("utf-8"))
        pos += header_len
        (row_count,) = struct.unpack_from("<Q", payload, pos)
        pos += 8
        columns = header["columns"]
        column_cells: list[list[Term | None]] = []
        for _ in columns:
            bitmap_len = (row_count + 7) // 8
            bitmap = payload[pos:pos + bitmap_len]
            pos += bitmap_len
            cells: list[Term | None] = []
            for i in range(row_count):
                if bitmap[i // 8] & (1 << (i % 8)):
                    (length,) = struct.unpack_from("<I", payload, pos)
                    pos += 4
                    cells.append(parse_term_token(payload[pos:pos + length].decode("utf-8")))
                    pos += length
                else:
                    cells.append(None)
            column_cells.append(cells)
        rows = [tuple(column_cells[c][r] for c in range(len(columns)))
                for r in range(row_count)]
        return cls(columns=columns, rows=rows)


def display_cell(cell: Term | None) -> str:
    if cell is None:
        return ""
    if isinstance(cell, Literal):
        return cell.lexical
    if isinstance(cell, Iri):
        return cell.value
    if isinstance(cell, BlankNode):
        return f"_:{cell.label}"
    raise TypeError(f"unknown cell {cell!r}")
