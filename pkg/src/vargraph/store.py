"""Embedded dictionary-encoded quad store with named-graph support.

Terms are interned to dense integer ids; quads live in four sorted orderings
(GSPO, GPOS, GOSP, SPOG) so any bound-position prefix can be answered with a
binary-search range scan.  The whole store snapshots to a single checksummed
file.
"""

from __future__ import annotations

import hashlib
import struct
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .rdf import Iri, Quad, Term, parse_term_token, term_token

_DEFAULT_GRAPH_ID = -1
_MAGIC = b"VKGSNAP1"
_VERSION = 1

# index orderings as permutations of the canonical (s, p, o, g) tuple
_ORDERS: dict[str, tuple[int, int, int, int]] = {
    "gspo": (3, 0, 1, 2),
    "gpos": (3, 1, 2, 0),
    "gosp": (3, 2, 0, 1),
    "spog": (0, 1, 2, 3),
}


class DefaultGraph:
    """Marker for 'match only the default graph' in patterns."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DEFAULT_GRAPH"


DEFAULT_GRAPH = DefaultGraph()


class StoreError(Exception):
    pass


class StoreLoadError(StoreError):
    def __init__(self, message: str, loaded: int):
        super().__init__(f"{message} (after {loaded} quads)")
        self.loaded = loaded


class StoreIntegrityError(StoreError):
    pass


@dataclass(frozen=True, slots=True)
class StoreStats:
    quad_count: int
    graph_count: int
    term_count: int


class QuadStore:
    def __init__(self):
        self._term_ids: dict[Term, int] = {}
        self._terms: list[Term] = []
        self._quads: set[tuple[int, int, int, int]] = set()
        self._indexes: dict[str, list[tuple[int, int, int, int]]] = {}
        self._dirty = True

    # --- dictionary -------------------------------------------------------

    def _intern(self, term: Term) -> int:
        tid = self._term_ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._term_ids[term] = tid
            self._terms.append(term)
        return tid

    def _lookup(self, term: Term) -> int | None:
        return self._term_ids.get(term)

    def decode_term(self, tid: int) -> Term:
        return self._terms[tid]

    # --- loading ----------------------------------------------------------

    def bulk_load(self, quads: Iterable[Quad]) -> StoreStats:
        loaded = 0
        try:
            for q in quads:
                g = _DEFAULT_GRAPH_ID if q.graph is None else self._intern(q.graph)
                self._quads.add(
                    (self._intern(q.subject), self._intern(q.predicate),
                     self._intern(q.object), g)
                )
                loaded += 1
        except MemoryError as exc:
            raise StoreLoadError("out of memory during load", loaded) from exc
        self._dirty = True
        return self.stats()

    def stats(self) -> StoreStats:
        graphs = {g for (_, _, _, g) in self._quads if g != _DEFAULT_GRAPH_ID}
        return StoreStats(
            quad_count=len(self._quads),
            graph_count=len(graphs),
            term_count=len(self._terms),
        )

    # --- matching ---------------------------------------------------------

    def _ensure_indexes(self) -> None:
        if not self._dirty:
            return
        for name, perm in _ORDERS.items():
            self._indexes[name] = sorted(
                tuple(q[i] for i in perm) for q in self._quads
            )
        self._dirty = False

    def _encode_pattern(
        self, s: Term | None, p: Term | None, o: Term | None,
        g: Term | DefaultGraph | None,
    ) -> tuple[int | None, ...] | None:
        """Pattern as ids in canonical order; None if a bound term is absent."""
        ids: list[int | None] = []
        for term in (s, p, o):
            if term is None:
                ids.append(None)
            else:
                tid = self._lookup(term)
                if tid is None:
                    return None
                ids.append(tid)
        if g is None:
            ids.append(None)
        elif isinstance(g, DefaultGraph):
            ids.append(_DEFAULT_GRAPH_ID)
        else:
            gid = self._lookup(g)
            if gid is None:
                return None
            ids.append(gid)
        return tuple(ids)

    def match(
        self,
        s: Term | None = None,
        p: Term | None = None,
        o: Term | None = None,
        g: Term | DefaultGraph | None = None,
    ) -> list[Quad]:
        """All quads matching the bound positions (None = wildcard; pass
        DEFAULT_GRAPH to restrict to the default graph)."""
        pattern = self._encode_pattern(s, p, o, g)
        if pattern is None:
            return []
        self._ensure_indexes()

        # longest bound prefix wins
        best_name, best_perm, best_len = "spog", _ORDERS["spog"], -1
        for name, perm in _ORDERS.items():
            length = 0
            for i in perm:
                if pattern[i] is None:
                    break
                length += 1
            if length > best_len:
                best_name, best_perm, best_len = name, perm, length
        index = self._indexes[best_name]
        prefix = [pattern[i] for i in best_perm[:best_len]]

        if prefix:
            lo = bisect_left(index, tuple(prefix))
            hi = bisect_left(index, tuple(prefix[:-1] + [prefix[-1] + 1]))
            candidates = index[lo:hi]
        else:
            candidates = index

        inverse = {pos: j for j, pos in enumerate(best_perm)}
        out = []
        for row in candidates:
            canonical = tuple(row[inverse[i]] for i in range(4))
            if all(pattern[i] is None or pattern[i] == canonical[i] for i in range(4)):
                out.append(self._decode(canonical))
        return out

    def match_triples(
        self, s: Term | None = None, p: Term | None = None, o: Term | None = None
    ) -> list[tuple[Term, Iri, Term]]:
        """Distinct (s, p, o) triples across the union of all graphs."""
        seen = set()
        out = []
        for q in self.match(s, p, o, None):
            key = q.triple()
            if key not in seen:
                seen.add(key)
                out.append(key)
        return out

    def _decode(self, ids: tuple[int, int, int, int]) -> Quad:
        s, p, o, g = ids
        return Quad(
            self._terms[s], self._terms[p], self._terms[o],
            None if g == _DEFAULT_GRAPH_ID else self._terms[g],
        )

    def list_graphs(self) -> list[Iri]:
        graphs = {g for (_, _, _, g) in self._quads if g != _DEFAULT_GRAPH_ID}
        return sorted((self._terms[g] for g in graphs), key=lambda t: t.value)

    def __len__(self) -> int:
        return len(self._quads)

    def __iter__(self) -> Iterator[Quad]:
        return (self._decode(q) for q in sorted(self._quads))

    # --- persistence --------------------------------------------------------

    def snapshot(self, path: str | Path) -> None:
        """Write header + dictionary + sorted encoded quads + sha256."""
        digest = hashlib.sha256()
        with open(path, "wb") as fh:
            def emit(data: bytes) -> None:
                digest.update(data)
                fh.write(data)

            emit(_MAGIC)
            emit(struct.pack("<I", _VERSION))
            emit(struct.pack("<Q", len(self._terms)))
            for term in self._terms:
                token = term_token(term).encode("utf-8")
                emit(struct.pack("<I", len(token)))
                emit(token)
            quads = sorted(self._quads)
            emit(struct.pack("<Q", len(quads)))
            flat = [v for q in quads for v in q]
            for start in range(0, len(flat), 40_000):
                chunk = flat[start:start + 40_000]
                emit(struct.pack(f"<{len(chunk)}q", *chunk))
            fh.write(digest.digest())

    @classmethod
    def open(cls, path: str | Path) -> "QuadStore":
        raw = Path(path).read_bytes()
        if len(raw) < len(_MAGIC) + 4 + 32:
            raise StoreIntegrityError("snapshot truncated")
        payload, checksum = raw[:-32], raw[-32:]
        if hashlib.sha256(payload).digest() != checksum:
            raise StoreIntegrityError("snapshot checksum mismatch")
        if payload[: len(_MAGIC)] != _MAGIC:
            raise StoreIntegrityError("not a quad-store snapshot")
        pos = len(_MAGIC)
        (version,) = struct.unpack_from("<I", payload, pos)
        pos += 4
        if version != _VERSION:
            raise StoreIntegrityError(f"unsupported snapshot version {version}")
        store = cls()
        (term_count,) = struct.unpack_from("<Q", payload, pos)
        pos += 8
        for _ in range(term_count):
            (length,) = struct.unpack_from("<I", payload, pos)
            pos += 4
            token = payload[pos:pos + length].decode("utf-8")
            pos += length
            store._intern(parse_term_token(token))
        (quad_count,) = struct.unpack_from("<Q", payload, pos)
        pos += 8
        flat = struct.unpack_from(f"<{quad_count * 4}q", payload, pos)
        store._quads = {tuple(flat[i:i + 4]) for i in range(0, len(flat), 4)}
        store._dirty = True
        return store
