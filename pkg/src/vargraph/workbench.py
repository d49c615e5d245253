"""Workspace-backed orchestrator for the three scenarios.

Owns the quad store (snapshot file in the workspace) and the content-addressed
artifact directories for result tables, ML graphs, and model checkpoints.
Both the HTTP service and the CLI's local mode run through this class, so the
two surfaces return identical payloads.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from pathlib import Path
from typing import Callable, Iterable

from . import convert, queries, vocab
from .gnn import (
    EpochEvent,
    Metrics,
    ModelConfig,
    TrainReport,
    evaluate as evaluate_model,
    load_checkpoint,
    save_checkpoint,
    train as train_model,
)
from .ingest import parse_cadd_tsv, parse_metadata_csv, parse_vcf
from .mlgraph import (
    GraphRecipe,
    MlGraph,
    RecipeError,
    assemble_graph,
    export_graph,
    import_graph,
)
from .sparql import evaluate as evaluate_query, parse_query
from .sparql.table import ResultTable
from .store import QuadStore

DEFAULT_ACCESSION_PATTERN = r"SRR\w+"


class WorkbenchError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class Workbench:
    def __init__(self, workspace: str | Path):
        self.workspace = Path(workspace)
        self.tables_dir = self.workspace / "tables"
        self.graphs_dir = self.workspace / "graphs"
        self.checkpoints_dir = self.workspace / "checkpoints"
        for directory in (self.tables_dir, self.graphs_dir, self.checkpoints_dir):
            directory.mkdir(parents=True, exist_ok=True)
        self.store_path = self.workspace / "store.quads"
        self._write_lock = threading.Lock()
        if self.store_path.exists():
            self.store = QuadStore.open(self.store_path)
        else:
            self.store = QuadStore()

    # --- enrichment -------------------------------------------------------

    def enrich(
        self,
        vcf_paths: Iterable[str | Path],
        cadd_paths: Iterable[str | Path] = (),
        metadata_paths: Iterable[str | Path] = (),
        accession_pattern: str = DEFAULT_ACCESSION_PATTERN,
    ) -> dict:
        vcf_paths = [Path(p) for p in vcf_paths]
        cadd_paths = [Path(p) for p in cadd_paths]
        metadata_paths = [Path(p) for p in metadata_paths]
        if not vcf_paths:
            raise WorkbenchError("no_files", "at least one VCF file is required")
        pattern = re.compile(accession_pattern)

        def accession_of(path: Path) -> str:
            m = pattern.search(path.name)
            if not m:
                raise WorkbenchError(
                    "no_accession",
                    f"cannot extract an accession from {path.name!r} "
                    f"with pattern {accession_pattern!r}",
                )
            return m.group(0)

        cadd_by_accession: dict[str, list] = {}
        for path in cadd_paths:
            accession = accession_of(path)
            try:
                cadd_by_accession.setdefault(accession, []).extend(parse_cadd_tsv(path))
            except ValueError as exc:
                raise WorkbenchError("bad_file", f"{path.name}: {exc}") from exc

        per_accession: dict[str, dict] = {}
        all_quads = []
        for path in vcf_paths:
            accession = accession_of(path)
            try:
                header, records = parse_vcf(path)
                cadds = cadd_by_accession.get(accession, [])
                quads = list(convert.vcf_to_quads(
                    list(records), header, accession,
                    cadd_index=convert.build_cadd_index(cadds),
                ))
            except ValueError as exc:
                raise WorkbenchError("bad_file", f"{path.name}: {exc}") from exc
            entry = per_accession.setdefault(
                accession, {"vcf_quads": 0, "cadd_triples": 0}
            )
            entry["vcf_quads"] += len(quads)
            all_quads.extend(quads)

        for accession, cadds in cadd_by_accession.items():
            triples = list(convert.cadd_to_triples(cadds, accession))
            entry = per_accession.setdefault(
                accession, {"vcf_quads": 0, "cadd_triples": 0}
            )
            entry["cadd_triples"] += len(triples)
            all_quads.extend(triples)

        metadata_quads = 0
        for path in metadata_paths:
            try:
                quads = list(convert.metadata_to_quads(parse_metadata_csv(path)))
            except ValueError as exc:
                raise WorkbenchError("bad_file", f"{path.name}: {exc}") from exc
            metadata_quads += len(quads)
            all_quads.extend(quads)

        with self._write_lock:
            before = self.store.stats().quad_count
            stats = self.store.bulk_load(all_quads)
            self.store.snapshot(self.store_path)
        return {
            "per_accession": per_accession,
            "metadata_quads": metadata_quads,
            "quads_added": stats.quad_count - before,
            "store": {
                "quad_count": stats.quad_count,
                "graph_count": stats.graph_count,
                "term_count": stats.term_count,
            },
        }

    # --- browsing -----------------------------------------------------------

    def accessions(self, min_age: float | None = None, max_age: float | None = None) -> list[str]:
        if min_age is not None and max_age is not None and min_age > max_age:
            raise WorkbenchError("invalid_age_range", "min_age exceeds max_age")
        if min_age is None and max_age is None:
            out = []
            for graph in self.store.list_graphs():
                accession = vocab.accession_of_graph(graph)
                if accession is not None:
                    out.append(accession)
            return out
        ast = parse_query(queries.accessions_by_age_query(min_age, max_age))
        table = evaluate_query(ast, self.store)
        out = []
        for (term,) in table.rows:
            accession = vocab.accession_of_graph(term)
            if accession is not None:
                out.append(accession)
        return sorted(out)

    # --- fetch ---------------------------------------------------------------

    def fetch(
        self,
        accession_ids: list[str] | None = None,
        min_age: float | None = None,
        max_age: float | None = None,
        features: list[str] | None = None,
    ) -> tuple[str, ResultTable]:
        if accession_ids is None:
            accession_ids = self.accessions(min_age, max_age)
        if not accession_ids:
            raise WorkbenchError("no_accessions", "no accession ids selected")
        features = list(features) if features else list(queries.FEATURE_COLUMNS)
        unknown = [f for f in features if f not in queries.FEATURE_COLUMNS]
        if unknown:
            raise WorkbenchError(
                "unknown_feature",
                f"unknown feature names {unknown}; valid: {queries.FEATURE_COLUMNS}",
            )
        ast = parse_query(queries.feature_query(accession_ids))
        table = evaluate_query(ast, self.store).select(features)
        table_id = self._save_artifact(self.tables_dir, ".tab", table.save)
        return table_id, table

    def load_table(self, table_id: str) -> ResultTable:
        path = self.tables_dir / f"{table_id}.tab"
        if not path.exists():
            raise WorkbenchError("unknown_table", f"no table {table_id!r}")
        return ResultTable.load(path)

    # --- graphs ---------------------------------------------------------------

    def precheck_recipe(self, table: ResultTable, recipe: GraphRecipe) -> None:
        """Cheap invariant checks done before a build job is queued."""
        for name in (*recipe.feature_columns, recipe.label_column):
            if name not in table.columns:
                raise RecipeError(f"no column {name!r} in table")
        if recipe.edge_policy == "gene_name" and recipe.gene_column not in table.columns:
            raise RecipeError(f"gene column {recipe.gene_column!r} not in table")
        if (recipe.edge_policy == "fully_connected"
                and len(table.rows) > recipe.fully_connected_cap):
            raise RecipeError(
                f"fully connected over {len(table.rows)} nodes exceeds cap "
                f"{recipe.fully_connected_cap} (O(n^2) edges)"
            )

    def build_graph(self, table_id: str, recipe: GraphRecipe) -> tuple[str, dict]:
        table = self.load_table(table_id)
        graph = assemble_graph(table, recipe)
        graph_id = self._save_artifact(
            self.graphs_dir, ".mlg", lambda p: export_graph(graph, p)
        )
        return graph_id, graph.summary().to_dict()

    def load_graph(self, graph_id: str) -> MlGraph:
        path = self.graphs_dir / f"{graph_id}.mlg"
        if not path.exists():
            raise WorkbenchError("unknown_graph", f"no graph {graph_id!r}")
        return import_graph(path)

    # --- training ----------------------------------------------------------------

    def train(
        self,
        graph_id: str,
        config: ModelConfig,
        telemetry: Callable[[EpochEvent], None] | None = None,
    ) -> tuple[str, TrainReport]:
        graph = self.load_graph(graph_id)
        report = train_model(graph, config, telemetry)
        checkpoint_id = self._save_artifact(
            self.checkpoints_dir, ".ckpt",
            lambda p: save_checkpoint(p, config, report.params),
        )
        return checkpoint_id, report

    def inference(self, checkpoint_id: str, graph_id: str) -> Metrics:
        path = self.checkpoints_dir / f"{checkpoint_id}.ckpt"
        if not path.exists():
            raise WorkbenchError("unknown_checkpoint", f"no checkpoint {checkpoint_id!r}")
        config, params = load_checkpoint(path)
        graph = self.load_graph(graph_id)
        return evaluate_model(params, graph, graph.test_mask, config)

    # --- artifacts ------------------------------------------------------------------

    def _save_artifact(self, directory: Path, suffix: str,
                       writer: Callable[[Path], None]) -> str:
        scratch = directory / f".tmp-{threading.get_ident()}{suffix}"
        writer(scratch)
        digest = hashlib.sha256(scratch.read_bytes()).hexdigest()[:16]
        final = directory / f"{digest}{suffix}"
        scratch.replace(final)
        return digest


def recipe_from_payload(payload: dict) -> GraphRecipe:
    """Recipe from a JSON dict; raises RecipeError on bad keys or values."""
    if not isinstance(payload, dict):
        raise RecipeError("recipe must be an object")
    data = dict(payload)
    if "feature_columns" in data and isinstance(data["feature_columns"], list):
        data["feature_columns"] = tuple(data["feature_columns"])
    if "label_bins" in data and isinstance(data["label_bins"], list):
        data["label_bins"] = tuple(data["label_bins"])
    try:
        return GraphRecipe.from_dict(data)
    except TypeError as exc:
        raise RecipeError(str(exc)) from exc


def model_config_from_payload(payload: dict) -> ModelConfig:
    if not isinstance(payload, dict):
        raise ValueError("model config must be an object")
    return ModelConfig(**payload)


def metrics_payload(metrics: Metrics) -> dict:
    return metrics.to_dict()


def report_payload(report: TrainReport) -> dict:
    return report.to_dict()
