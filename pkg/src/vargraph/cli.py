"""Command-line surface for the three scenarios.

Runs against a local workspace directly, or against a running service when
--service is given; both modes print identical payloads in --format json.
Training jobs are recorded in the workspace (local) or the service registry
(remote) so `infer --job <id>` works the same way in both modes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable

import httpx

from .gnn import ModelConfig, NumericError
from .mlgraph import RecipeError
from .workbench import (
    Workbench,
    WorkbenchError,
    metrics_payload,
    recipe_from_payload,
    report_payload,
)

WORKSPACE_ENV = "VARGRAPH_WORKSPACE"
POLL_INTERVAL_S = 0.05


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class LocalBackend:
    def __init__(self, workspace: Path, echo: Callable[[str], None]):
        self.bench = Workbench(workspace)
        self.jobs_path = workspace / "jobs.json"
        self.echo = echo

    def _record_job(self, artifacts: dict) -> str:
        jobs = {}
        if self.jobs_path.exists():
            jobs = json.loads(self.jobs_path.read_text())
        job_id = f"local{len(jobs):04d}"
        jobs[job_id] = artifacts
        self.jobs_path.write_text(json.dumps(jobs, indent=2, sort_keys=True))
        return job_id

    def enrich(self, vcf, cadd, metadata, pattern) -> dict:
        return self.bench.enrich(vcf, cadd, metadata, accession_pattern=pattern)

    def accessions(self, min_age, max_age) -> dict:
        return {"accessions": self.bench.accessions(min_age, max_age)}

    def fetch(self, accession_ids, min_age, max_age, features) -> dict:
        table_id, table = self.bench.fetch(accession_ids, min_age, max_age, features)
        return {"table_id": table_id, "columns": table.columns,
                "row_count": len(table.rows)}

    def build_graph(self, table_id, recipe_payload) -> dict:
        recipe = recipe_from_payload(recipe_payload)
        table = self.bench.load_table(table_id)
        self.bench.precheck_recipe(table, recipe)
        graph_id, summary = self.bench.build_graph(table_id, recipe)
        return {"graph_id": graph_id, "summary": summary}

    def train(self, graph_id, config_payload) -> dict:
        config = ModelConfig(**config_payload)

        def telemetry(event):
            self.echo(
                f"epoch {event.epoch}: train_loss={event.train_loss:.4f} "
                f"val_loss={event.val_loss:.4f} val_acc={event.val_accuracy:.4f}"
            )

        checkpoint_id, report = self.bench.train(graph_id, config, telemetry)
        artifacts = {
            "checkpoint_id": checkpoint_id,
            "graph_id": graph_id,
            "report": report_payload(report),
        }
        job_id = self._record_job(
            {"checkpoint_id": checkpoint_id, "graph_id": graph_id}
        )
        return {"job_id": job_id, **artifacts}

    def infer(self, job_id) -> dict:
        if not self.jobs_path.exists():
            raise CliError("unknown_job", f"no job {job_id!r}")
        jobs = json.loads(self.jobs_path.read_text())
        if job_id not in jobs:
            raise CliError("unknown_job", f"no job {job_id!r}")
        entry = jobs[job_id]
        metrics = self.bench.inference(entry["checkpoint_id"], entry["graph_id"])
        return metrics_payload(metrics)


class RemoteBackend:
    def __init__(self, client: httpx.Client, echo: Callable[[str], None]):
        self.client = client
        self.echo = echo

    def _check(self, response) -> dict:
        body = response.json()
        if response.status_code >= 400:
            error = body.get("error", {})
            raise CliError(error.get("code", "http_error"),
                           error.get("message", f"HTTP {response.status_code}"))
        return body

    def _wait(self, job: dict) -> dict:
        job_id = job["job_id"]
        while job["state"] not in ("succeeded", "failed"):
            time.sleep(POLL_INTERVAL_S)
            job = self._check(self.client.get(f"/jobs/{job_id}"))
        if job["state"] == "failed":
            raise CliError("job_failed", job.get("error") or "job failed")
        return job

    def enrich(self, vcf, cadd, metadata, pattern) -> dict:
        files = []
        for kind, paths in (("vcf", vcf), ("cadd", cadd), ("metadata", metadata)):
            for path in paths:
                files.append((kind, (Path(path).name, Path(path).read_bytes())))
        response = self.client.post(
            "/enrich", files=files, data={"accession_pattern": pattern}
        )
        return self._wait(self._check(response))["artifacts"]

    def accessions(self, min_age, max_age) -> dict:
        params = {}
        if min_age is not None:
            params["min_age"] = min_age
        if max_age is not None:
            params["max_age"] = max_age
        return self._check(self.client.get("/accessions", params=params))

    def fetch(self, accession_ids, min_age, max_age, features) -> dict:
        payload = {"accession_ids": accession_ids, "min_age": min_age,
                   "max_age": max_age, "features": features}
        job = self._check(self.client.post("/fetch", json=payload))
        return self._wait(job)["artifacts"]

    def build_graph(self, table_id, recipe_payload) -> dict:
        job = self._check(self.client.post(
            "/graphs", json={"table_id": table_id, "recipe": recipe_payload}
        ))
        return self._wait(job)["artifacts"]

    def train(self, graph_id, config_payload) -> dict:
        job = self._check(self.client.post(
            "/train", json={"graph_id": graph_id, "config": config_payload}
        ))
        job_id = job["job_id"]
        last_epoch = -1
        while job["state"] not in ("succeeded", "failed"):
            stream = self._check(
                self.client.get(f"/train/{job_id}/telemetry", params={"after": last_epoch})
            )
            for event in stream["events"]:
                self.echo(
                    f"epoch {event['epoch']}: train_loss={event['train_loss']:.4f} "
                    f"val_loss={event['val_loss']:.4f} val_acc={event['val_accuracy']:.4f}"
                )
                last_epoch = event["epoch"]
            time.sleep(POLL_INTERVAL_S)
            job = self._check(self.client.get(f"/jobs/{job_id}"))
        if job["state"] == "failed":
            raise CliError("job_failed", job.get("error") or "job failed")
        return {"job_id": job_id, **job["artifacts"]}

    def infer(self, job_id) -> dict:
        return self._check(self.client.get(f"/inference/{job_id}"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vargraph",
        description="Variant knowledge-graph workbench: enrichment, graph "
                    "creation, and GNN training/inference.",
    )
    parser.add_argument("--workspace", default=os.environ.get(WORKSPACE_ENV, "workspace"),
                        help=f"workspace directory (env {WORKSPACE_ENV})")
    parser.add_argument("--service", default=None,
                        help="service URL; switches to remote mode")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    enrich = sub.add_parser("enrich", help="convert and load variant files")
    enrich.add_argument("--vcf", nargs="+", required=True)
    enrich.add_argument("--cadd", nargs="*", default=[])
    enrich.add_argument("--metadata", nargs="*", default=[])
    enrich.add_argument("--accession-pattern", default=r"SRR\w+")

    accessions = sub.add_parser("accessions", help="list accession ids")
    accessions.add_argument("--min-age", type=float, default=None)
    accessions.add_argument("--max-age", type=float, default=None)

    fetch = sub.add_parser("fetch", help="run the feature query into a table")
    fetch.add_argument("--accessions", nargs="*", default=None)
    fetch.add_argument("--min-age", type=float, default=None)
    fetch.add_argument("--max-age", type=float, default=None)
    fetch.add_argument("--features", nargs="*", default=None)

    graph = sub.add_parser("graph", help="build an ML graph from a table")
    graph.add_argument("--table", required=True)
    graph.add_argument("--recipe", help="recipe JSON file")
    graph.add_argument("--features", nargs="*", default=None)
    graph.add_argument("--label", default=None)
    graph.add_argument("--edge-policy", choices=("gene_name", "fully_connected"))
    graph.add_argument("--gene-column", default=None)
    graph.add_argument("--weight-mode", choices=("constant", "in_degree", "user"))
    graph.add_argument("--weight-value", type=float, default=None)
    graph.add_argument("--bidirectional", action=argparse.BooleanOptionalAction,
                       default=None)
    graph.add_argument("--train-pct", type=int, default=None)
    graph.add_argument("--val-pct", type=int, default=None)
    graph.add_argument("--seed", type=int, default=None)
    graph.add_argument("--label-bins", nargs="*", type=float, default=None)
    graph.add_argument("--standardize", action=argparse.BooleanOptionalAction,
                       default=None)

    train = sub.add_parser("train", help="train a model on a graph")
    train.add_argument("--graph", required=True)
    train.add_argument("--model", choices=("gcn", "sage"), default="gcn")
    train.add_argument("--layers", type=int, default=1)
    train.add_argument("--hidden", type=int, default=16)
    train.add_argument("--dropout", type=float, default=0.0)
    train.add_argument("--lr", type=float, default=0.01)
    train.add_argument("--epochs", type=int, default=100)
    train.add_argument("--seed", type=int, default=0)

    infer = sub.add_parser("infer", help="test-mask metrics for a train job")
    infer.add_argument("--job", required=True)
    return parser


_RECIPE_FLAGS = {
    "features": "feature_columns",
    "label": "label_column",
    "edge_policy": "edge_policy",
    "gene_column": "gene_column",
    "weight_mode": "edge_weight_mode",
    "weight_value": "edge_weight_value",
    "bidirectional": "bidirectional",
    "train_pct": "train_pct",
    "val_pct": "val_pct",
    "seed": "seed",
    "label_bins": "label_bins",
    "standardize": "standardize",
}


def _recipe_payload(args: argparse.Namespace) -> dict:
    payload: dict[str, Any] = {}
    if args.recipe:
        try:
            payload = json.loads(Path(args.recipe).read_text())
        except json.JSONDecodeError as exc:
            raise CliError("bad_recipe_file", f"{args.recipe}: {exc}") from exc
    for flag, key in _RECIPE_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            payload[key] = value
    return payload


def _print_text(command: str, payload: dict, echo: Callable[[str], None]) -> None:
    if command == "enrich":
        for accession, counts in sorted(payload["per_accession"].items()):
            echo(f"{accession}: {counts['vcf_quads']} VCF quads, "
                 f"{counts['cadd_triples']} CADD triples")
        echo(f"metadata quads: {payload['metadata_quads']}")
        echo(f"quads added: {payload['quads_added']} "
             f"(store total {payload['store']['quad_count']})")
    elif command == "accessions":
        for accession in payload["accessions"]:
            echo(accession)
    elif command == "fetch":
        echo(f"table {payload['table_id']}: {payload['row_count']} rows x "
             f"{len(payload['columns'])} columns")
    elif command == "graph":
        summary = payload["summary"]
        echo(f"graph {payload['graph_id']}: {summary['num_nodes']} nodes, "
             f"{summary['num_edges']} edges, {summary['num_classes']} classes")
        echo(f"features: {', '.join(summary['features'])}")
        echo(f"label: {summary['label']}  split: "
             f"{summary['split'][0]}:{summary['split'][1]}:{summary['split'][2]}")
    elif command == "train":
        report = payload["report"]
        echo(f"job {payload['job_id']}  checkpoint {payload['checkpoint_id']}")
        echo(f"epochs run: {report['epochs_run']}  "
             f"final val_acc: {report['val_accuracy'][-1]:.4f}")
    elif command == "infer":
        header = f"{'class':<12}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>9}"
        echo(header)
        for row in payload["per_class"]:
            echo(f"{row['class']:<12}{row['precision']:>10.4f}{row['recall']:>10.4f}"
                 f"{row['f1']:>10.4f}{row['support']:>9d}")
        macro, weighted = payload["macro"], payload["weighted"]
        total = sum(r["support"] for r in payload["per_class"])
        echo(f"{'macro':<12}{macro['precision']:>10.4f}{macro['recall']:>10.4f}"
             f"{macro['f1']:>10.4f}{total:>9d}")
        echo(f"{'weighted':<12}{weighted['precision']:>10.4f}{weighted['recall']:>10.4f}"
             f"{weighted['f1']:>10.4f}{total:>9d}")
        echo(f"accuracy: {payload['accuracy']:.4f}")
        echo("confusion matrix (rows = true):")
        for row in payload["confusion_matrix"]:
            echo("  " + " ".join(f"{cell:>5d}" for cell in row))


def main(argv: list[str] | None = None,
         client_factory: Callable[[str], httpx.Client] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    echo = print

    if args.service:
        factory = client_factory or (lambda url: httpx.Client(base_url=url, timeout=300))
        backend: LocalBackend | RemoteBackend = RemoteBackend(factory(args.service), echo)
    else:
        backend = LocalBackend(Path(args.workspace), echo)

    telemetry_to_stderr = args.format == "json"
    if telemetry_to_stderr:
        backend.echo = lambda line: print(line, file=sys.stderr)

    try:
        if args.command == "enrich":
            payload = backend.enrich(args.vcf, args.cadd, args.metadata,
                                     args.accession_pattern)
        elif args.command == "accessions":
            payload = backend.accessions(args.min_age, args.max_age)
        elif args.command == "fetch":
            payload = backend.fetch(args.accessions, args.min_age, args.max_age,
                                    args.features)
        elif args.command == "graph":
            payload = backend.build_graph(args.table, _recipe_payload(args))
        elif args.command == "train":
            config = {
                "model_kind": args.model,
                "num_layers": args.layers,
                "hidden_dim": args.hidden,
                "dropout": args.dropout,
                "learning_rate": args.lr,
                "epochs": args.epochs,
                "seed": args.seed,
            }
            payload = backend.train(args.graph, config)
        elif args.command == "infer":
            payload = backend.infer(args.job)
        else:  # pragma: no cover - argparse enforces the choices
            raise CliError("unknown_command", args.command)
    except (CliError, WorkbenchError) as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 1
    except (RecipeError, NumericError, ValueError) as exc:
        print(f"error: invalid_input: {exc}", file=sys.stderr)
        return 1

    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        _print_text(args.command, payload, echo)
    return 0


if __name__ == "__main__":
    sys.exit(main())
