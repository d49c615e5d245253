"""Turn a query result table into an integer-encoded graph for node
classification: dictionary-encoded features, binned or encoded labels,
gene-clique or fully-connected edges, and seeded train/val/test masks.
"""

from __future__ import annotations

import hashlib
import json
import struct
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .rdf import NUMERIC_DATATYPES, BlankNode, Iri, Literal, Term
from .sparql.table import ResultTable

_MAGIC = b"VKGMLG01"
_VERSION = 1

# reserved dictionary code for a missing categorical cell
MISSING_CODE = -1.0


class RecipeError(ValueError):
    """A recipe violates one of its invariants for the given table."""


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ClassBinning:
    """Right-open intervals over a continuous label column.

    boundaries [10, 20, 30] produce classes [0,10), [10,20), [20,30), [30,inf).
    """

    boundaries: tuple[float, ...] = (10.0, 20.0, 30.0)

    def __post_init__(self):
        if list(self.boundaries) != sorted(set(self.boundaries)):
            raise RecipeError("binning boundaries must be strictly ascending")
        if not self.boundaries:
            raise RecipeError("binning needs at least one boundary")

    def class_of(self, value: float) -> int:
        return bisect_right(self.boundaries, value)

    def class_names(self) -> list[str]:
        lows = [0.0] + list(self.boundaries)
        names = []
        for i, low in enumerate(lows[:-1]):
            names.append(f"[{low:g},{lows[i + 1]:g})")
        names.append(f"[{lows[-1]:g},inf)")
        return names


@dataclass(frozen=True)
class GraphRecipe:
    feature_columns: tuple[str, ...]
    label_column: str
    edge_policy: str = "gene_name"  # or "fully_connected"
    gene_column: str = "ann_split_1"
    edge_weight_mode: str = "constant"  # "constant" | "in_degree" | "user"
    edge_weight_value: float = 1.0
    bidirectional: bool = True
    train_pct: int = 80
    val_pct: int = 10
    seed: int = 0
    label_bins: tuple[float, ...] | None = None
    standardize: bool = False  # z-score numeric feature columns
    fully_connected_cap: int = 5000
    gene_clique_cap: int = 500

    def __post_init__(self):
        object.__setattr__(self, "feature_columns", tuple(self.feature_columns))
        if self.label_bins is not None:
            object.__setattr__(self, "label_bins", tuple(self.label_bins))
        if self.label_column in self.feature_columns:
            raise RecipeError("label column cannot be a feature column")
        if not self.feature_columns:
            raise RecipeError("at least one feature column required")
        if self.train_pct < 0 or self.val_pct < 0:
            raise RecipeError("split percentages must be non-negative")
        if self.train_pct + self.val_pct > 100:
            raise RecipeError("train + val percentages exceed 100")
        if self.edge_policy not in ("gene_name", "fully_connected"):
            raise RecipeError(f"unknown edge policy {self.edge_policy!r}")
        if self.edge_weight_mode not in ("constant", "in_degree", "user"):
            raise RecipeError(f"unknown edge weight mode {self.edge_weight_mode!r}")

    @property
    def test_pct(self) -> int:
        return 100 - self.train_pct - self.val_pct

    def binning(self) -> ClassBinning:
        if self.label_bins is None:
            return ClassBinning()
        return ClassBinning(self.label_bins)

    @classmethod
    def from_dict(cls, data: dict) -> "GraphRecipe":
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(data) - known
        if unknown:
            raise RecipeError(f"unknown recipe keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class EncodingDictionaries:
    """Per-categorical-column value<->code maps plus the label class names."""

    columns: dict[str, list[str]] = field(default_factory=dict)
    label_classes: list[str] = field(default_factory=list)

    def encode(self, column: str, value: str) -> int:
        return self.columns[column].index(value)

    def decode(self, column: str, code: int) -> str | None:
        if code == int(MISSING_CODE):
            return None
        return self.columns[column][code]


@dataclass
class GraphSummary:
    features: list[str]
    label: str
    num_classes: int
    num_nodes: int
    num_edges: int
    feature_dim: int
    edge_policy: str
    edge_weight_mode: str
    bidirectional: bool
    split: tuple[int, int, int]

    def to_dict(self) -> dict:
        return {
            "features": self.features,
            "label": self.label,
            "num_classes": self.num_classes,
            "num_nodes": self.num_nodes,
            "num_edges": self.num_edges,
            "feature_dim": self.feature_dim,
            "edge_policy": self.edge_policy,
            "edge_weight_mode": self.edge_weight_mode,
            "bidirectional": self.bidirectional,
            "split": list(self.split),
        }


@dataclass
class MlGraph:
    num_nodes: int
    node_features: np.ndarray  # (N, F) float64
    labels: np.ndarray  # (N,) int64
    edges: np.ndarray  # (E, 2) int64 source,destination
    edge_weights: np.ndarray  # (E,) float64
    train_mask: np.ndarray  # (N,) bool
    val_mask: np.ndarray
    test_mask: np.ndarray
    dictionaries: EncodingDictionaries
    feature_names: list[str]
    label_name: str
    recipe: GraphRecipe

    @property
    def num_classes(self) -> int:
        return len(self.dictionaries.label_classes)

    def summary(self) -> GraphSummary:
        return GraphSummary(
            features=list(self.recipe.feature_columns),
            label=self.label_name,
            num_classes=self.num_classes,
            num_nodes=self.num_nodes,
            num_edges=len(self.edges),
            feature_dim=self.node_features.shape[1],
            edge_policy=self.recipe.edge_policy,
            edge_weight_mode=self.recipe.edge_weight_mode,
            bidirectional=self.recipe.bidirectional,
            split=(self.recipe.train_pct, self.recipe.val_pct, self.recipe.test_pct),
        )

    def validate(self) -> None:
        n = self.num_nodes
        if self.node_features.shape[0] != n or self.labels.shape[0] != n:
            raise GraphFormatError("feature/label row count mismatch")
        if not np.isfinite(self.node_features).all():
            raise GraphFormatError("non-finite feature cell")
        if len(self.edges) != len(self.edge_weights):
            raise GraphFormatError("edge/weight length mismatch")
        if len(self.edges) and (self.edges.min() < 0 or self.edges.max() >= n):
            raise GraphFormatError("edge endpoint out of range")
        masks = self.train_mask.astype(int) + self.val_mask.astype(int) + self.test_mask.astype(int)
        if not (masks == 1).all():
            raise GraphFormatError("masks must be disjoint and cover all nodes")

    def equals(self, other: "MlGraph") -> bool:
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.node_features, other.node_features)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.edge_weights, other.edge_weights)
            and np.array_equal(self.train_mask, other.train_mask)
            and np.array_equal(self.val_mask, other.val_mask)
            and np.array_equal(self.test_mask, other.test_mask)
            and self.dictionaries.columns == other.dictionaries.columns
            and self.dictionaries.label_classes == other.dictionaries.label_classes
            and self.feature_names == other.feature_names
            and self.label_name == other.label_name
        )


def _cell_key(term: Term | None) -> str | None:
    """Dictionary key for a categorical cell."""
    if term is None:
        return None
    if isinstance(term, Literal):
        return term.lexical
    if isinstance(term, Iri):
        return term.value
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    raise TypeError(f"unknown cell {term!r}")


def _numeric_cell(term: Term | None) -> float | None:
    if term is None:
        return None
    if isinstance(term, Literal) and term.datatype in NUMERIC_DATATYPES:
        try:
            return float(term.lexical)
        except ValueError:
            return None
    return None


def _column_is_numeric(cells: list[Term | None]) -> bool:
    saw_value = False
    for cell in cells:
        if cell is None:
            continue
        saw_value = True
        if _numeric_cell(cell) is None:
            return False
    return saw_value


def encode_features(
    table: ResultTable, recipe: GraphRecipe
) -> tuple[np.ndarray, np.ndarray, EncodingDictionaries, list[str]]:
    """Returns (features, labels, dictionaries, feature_names).

    Numeric columns pass through (0.0 + presence column when nulls occur);
    string columns get first-seen dense codes with -1 for missing cells.
    """
    for name in (*recipe.feature_columns, recipe.label_column):
        try:
            table.column_index(name)
        except KeyError as exc:
            raise RecipeError(str(exc)) from None

    dictionaries = EncodingDictionaries()
    feature_names: list[str] = []
    feature_vectors: list[np.ndarray] = []
    n = len(table.rows)

    for name in recipe.feature_columns:
        cells = table.column(name)
        if _column_is_numeric(cells):
            values = np.zeros(n)
            present = np.zeros(n)
            for i, cell in enumerate(cells):
                value = _numeric_cell(cell)
                if value is not None:
                    values[i] = value
                    present[i] = 1.0
            if recipe.standardize:
                observed = values[present == 1.0]
                spread = observed.std() if len(observed) else 0.0
                if spread > 0.0:
                    values = np.where(present == 1.0,
                                      (values - observed.mean()) / spread, 0.0)
            feature_names.append(name)
            feature_vectors.append(values)
            if (present == 0.0).any():
                feature_names.append(f"{name}__present")
                feature_vectors.append(present)
        else:
            codes = np.empty(n)
            mapping: dict[str, int] = {}
            order: list[str] = []
            for i, cell in enumerate(cells):
                key = _cell_key(cell)
                if key is None:
                    codes[i] = MISSING_CODE
                    continue
                if key not in mapping:
                    mapping[key] = len(order)
                    order.append(key)
                codes[i] = mapping[key]
            dictionaries.columns[name] = order
            feature_names.append(name)
            feature_vectors.append(codes)

    label_cells = table.column(recipe.label_column)
    null_labels = sum(cell is None for cell in label_cells)
    if null_labels == n:
        raise RecipeError(f"label column {recipe.label_column!r} is entirely null")
    if null_labels:
        raise RecipeError(
            f"label column {recipe.label_column!r} has {null_labels} null cells; "
            "fetch only CADD-complete variants or choose another label"
        )

    labels = np.empty(n, dtype=np.int64)
    if _column_is_numeric(label_cells):
        binning = recipe.binning()
        for i, cell in enumerate(label_cells):
            labels[i] = binning.class_of(_numeric_cell(cell))
        names = binning.class_names()
        used = sorted(set(labels.tolist()))
        # classes re-packed to the observed bins so C matches the data
        remap = {cls: j for j, cls in enumerate(used)}
        labels = np.array([remap[int(c)] for c in labels], dtype=np.int64)
        dictionaries.label_classes = [names[c] for c in used]
    else:
        mapping = {}
        order = []
        for i, cell in enumerate(label_cells):
            key = _cell_key(cell)
            if key not in mapping:
                mapping[key] = len(order)
                order.append(key)
            labels[i] = mapping[key]
        dictionaries.label_classes = order

    if len(dictionaries.label_classes) < 2:
        raise RecipeError("label column produces fewer than 2 classes")

    features = (
        np.stack(feature_vectors, axis=1) if feature_vectors else np.zeros((n, 0))
    )
    return features, labels, dictionaries, feature_names


def extract_gene(term: Term | None) -> str | None:
    """Gene name from an ann_split_1 cell (4th pipe field) or a plain value."""
    key = _cell_key(term)
    if key is None or key == "":
        return None
    if "|" in key:
        parts = key.split("|")
        return parts[3] if len(parts) >= 4 and parts[3] else None
    return key


def build_edges(
    table: ResultTable, recipe: GraphRecipe
) -> tuple[np.ndarray, np.ndarray]:
    """Edges as ordered (src, dst) pairs plus aligned weights."""
    n = len(table.rows)
    pairs: list[tuple[int, int]] = []
    if recipe.edge_policy == "fully_connected":
        if n > recipe.fully_connected_cap:
            raise RecipeError(
                f"fully connected over {n} nodes exceeds cap "
                f"{recipe.fully_connected_cap} (O(n^2) edges)"
            )
        for u in range(n):
            for v in range(n):
                if u != v and (recipe.bidirectional or u < v):
                    pairs.append((u, v))
    else:
        try:
            gene_cells = table.column(recipe.gene_column)
        except KeyError as exc:
            raise RecipeError(str(exc)) from None
        groups: dict[str, list[int]] = {}
        for i, cell in enumerate(gene_cells):
            gene = extract_gene(cell)
            if gene is not None:
                groups.setdefault(gene, []).append(i)
        for gene, members in groups.items():
            if len(members) > recipe.gene_clique_cap:
                raise RecipeError(
                    f"gene {gene!r} clique of {len(members)} exceeds cap "
                    f"{recipe.gene_clique_cap}"
                )
            for u in members:
                for v in members:
                    if u != v and (recipe.bidirectional or u < v):
                        pairs.append((u, v))
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    weights = edge_weights(edges, n, recipe.edge_weight_mode, recipe.edge_weight_value)
    return edges, weights


def edge_weights(
    edges: np.ndarray, num_nodes: int, mode: str, user_value: float = 1.0
) -> np.ndarray:
    """constant -> 1.0; in_degree -> destination's in-degree in the final edge
    set; user -> the supplied constant."""
    if mode == "constant":
        return np.ones(len(edges))
    if mode == "user":
        return np.full(len(edges), float(user_value))
    indegree = np.zeros(num_nodes, dtype=np.int64)
    for _, dst in edges:
        indegree[dst] += 1
    return indegree[edges[:, 1]].astype(np.float64) if len(edges) else np.zeros(0)


def assign_masks(
    num_nodes: int, train_pct: int, val_pct: int, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Seeded permutation split into floor(train%), floor(val%), remainder."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(num_nodes)
    n_train = num_nodes * train_pct // 100
    n_val = num_nodes * val_pct // 100
    train = np.zeros(num_nodes, dtype=bool)
    val = np.zeros(num_nodes, dtype=bool)
    test = np.zeros(num_nodes, dtype=bool)
    train[order[:n_train]] = True
    val[order[n_train:n_train + n_val]] = True
    test[order[n_train + n_val:]] = True
    return train, val, test


def assemble_graph(table: ResultTable, recipe: GraphRecipe) -> MlGraph:
    features, labels, dictionaries, feature_names = encode_features(table, recipe)
    edges, weights = build_edges(table, recipe)
    train, val, test = assign_masks(len(table.rows), recipe.train_pct, recipe.val_pct, recipe.seed)
    graph = MlGraph(
        num_nodes=len(table.rows),
        node_features=features,
        labels=labels,
        edges=edges,
        edge_weights=weights,
        train_mask=train,
        val_mask=val,
        test_mask=test,
        dictionaries=dictionaries,
        feature_names=feature_names,
        label_name=recipe.label_column,
        recipe=recipe,
    )
    graph.validate()
    return graph


# --- container -----------------------------------------------------------------


def _recipe_to_dict(recipe: GraphRecipe) -> dict:
    return {
        "feature_columns": list(recipe.feature_columns),
        "label_column": recipe.label_column,
        "edge_policy": recipe.edge_policy,
        "gene_column": recipe.gene_column,
        "edge_weight_mode": recipe.edge_weight_mode,
        "edge_weight_value": recipe.edge_weight_value,
        "bidirectional": recipe.bidirectional,
        "train_pct": recipe.train_pct,
        "val_pct": recipe.val_pct,
        "seed": recipe.seed,
        "label_bins": list(recipe.label_bins) if recipe.label_bins is not None else None,
        "standardize": recipe.standardize,
        "fully_connected_cap": recipe.fully_connected_cap,
        "gene_clique_cap": recipe.gene_clique_cap,
    }


def _recipe_from_dict(data: dict) -> GraphRecipe:
    if data.get("label_bins") is not None:
        data = dict(data, label_bins=tuple(data["label_bins"]))
    return GraphRecipe(**dict(data, feature_columns=tuple(data["feature_columns"])))


def export_graph(graph: MlGraph, path: str | Path) -> None:
    header = {
        "num_nodes": graph.num_nodes,
        "feature_dim": graph.node_features.shape[1],
        "num_edges": int(len(graph.edges)),
        "feature_names": graph.feature_names,
        "label_name": graph.label_name,
        "dictionaries": graph.dictionaries.columns,
        "label_classes": graph.dictionaries.label_classes,
        "recipe": _recipe_to_dict(graph.recipe),
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    digest = hashlib.sha256()
    with open(path, "wb") as fh:
        def emit(data: bytes) -> None:
            digest.update(data)
            fh.write(data)

        emit(_MAGIC)
        emit(struct.pack("<I", _VERSION))
        emit(struct.pack("<I", len(header_bytes)))
        emit(header_bytes)
        emit(np.ascontiguousarray(graph.node_features, dtype="<f8").tobytes())
        emit(np.ascontiguousarray(graph.labels, dtype="<i8").tobytes())
        emit(np.ascontiguousarray(graph.edges, dtype="<i8").tobytes())
        emit(np.ascontiguousarray(graph.edge_weights, dtype="<f8").tobytes())
        for mask in (graph.train_mask, graph.val_mask, graph.test_mask):
            emit(np.packbits(mask).tobytes())
        fh.write(digest.digest())


def import_graph(path: str | Path) -> MlGraph:
    raw = Path(path).read_bytes()
    if len(raw) < len(_MAGIC) + 8 + 32:
        raise GraphFormatError("graph container truncated")
    payload, checksum = raw[:-32], raw[-32:]
    if hashlib.sha256(payload).digest() != checksum:
        raise GraphFormatError("graph container checksum mismatch")
    if payload[: len(_MAGIC)] != _MAGIC:
        raise GraphFormatError("not a graph container")
    pos = len(_MAGIC)
    (version,) = struct.unpack_from("<I", payload, pos)
    pos += 4
    if version != _VERSION:
        raise GraphFormatError(f"unsupported graph container version {version}")
    (header_len,) = struct.unpack_from("<I", payload, pos)
    pos += 4
    header = json.loads(payload[pos:pos + header_len].decode("utf-8"))
    pos += header_len

    n = header["num_nodes"]
    fdim = header["feature_dim"]
    n_edges = header["num_edges"]

    def take(count: int, dtype: str) -> np.ndarray:
        nonlocal pos
        nbytes = count * np.dtype(dtype).itemsize
        arr = np.frombuffer(payload[pos:pos + nbytes], dtype=dtype).copy()
        pos += nbytes
        return arr

    features = take(n * fdim, "<f8").reshape(n, fdim)
    labels = take(n, "<i8")
    edges = take(n_edges * 2, "<i8").reshape(n_edges, 2)
    weights = take(n_edges, "<f8")
    masks = []
    mask_bytes = (n + 7) // 8
    for _ in range(3):
        packed = np.frombuffer(payload[pos:pos + mask_bytes], dtype=np.uint8)
        pos += mask_bytes
        masks.append(np.unpackbits(packed, count=n).astype(bool))

    dictionaries = EncodingDictionaries(
        columns={k: list(v) for k, v in header["dictionaries"].items()},
        label_classes=list(header["label_classes"]),
    )
    graph = MlGraph(
        num_nodes=n,
        node_features=features,
        labels=labels,
        edges=edges,
        edge_weights=weights,
        train_mask=masks[0],
        val_mask=masks[1],
        test_mask=masks[2],
        dictionaries=dictionaries,
        feature_names=list(header["feature_names"]),
        label_name=header["label_name"],
        recipe=_recipe_from_dict(header["recipe"]),
    )
    graph.validate()
    return graph
