#!/usr/bin/env python3
"""Record service responses as JSON fixtures for the web-console tests.

Runs the full pipeline on a deterministic synthetic cohort and snapshots each
payload the console consumes, plus a validation-case list asserted against the
server-side types so client and server validation cannot drift.
"""

import json
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from vargraph.cohort import make_cohort
from vargraph.gnn import ModelConfig
from vargraph.mlgraph import GraphRecipe, RecipeError
from vargraph.service import create_app

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

VALIDATION_CASES = {
    "recipes": [
        {"recipe": {"feature_columns": ["position"], "label_column": "phred_score"},
         "valid": True},
        {"recipe": {"feature_columns": ["position"], "label_column": "position"},
         "valid": False, "reason": "label in features"},
        {"recipe": {"feature_columns": [], "label_column": "phred_score"},
         "valid": False, "reason": "no features"},
        {"recipe": {"feature_columns": ["position"], "label_column": "phred_score",
                    "train_pct": 95, "val_pct": 10},
         "valid": False, "reason": "train+val > 100"},
        {"recipe": {"feature_columns": ["position"], "label_column": "phred_score",
                    "train_pct": -1, "val_pct": 10},
         "valid": False, "reason": "negative split"},
        {"recipe": {"feature_columns": ["position"], "label_column": "phred_score",
                    "edge_policy": "ring"},
         "valid": False, "reason": "unknown edge policy"},
        {"recipe": {"feature_columns": ["position"], "label_column": "phred_score",
                    "edge_policy": "fully_connected", "train_pct": 70,
                    "val_pct": 15},
         "valid": True},
    ],
    "model_configs": [
        {"config": {"model_kind": "gcn", "epochs": 10}, "valid": True},
        {"config": {"model_kind": "sage", "epochs": 10, "dropout": 0.5},
         "valid": True},
        {"config": {"model_kind": "gcn", "epochs": 0}, "valid": False,
         "reason": "epochs < 1"},
        {"config": {"model_kind": "gcn", "dropout": 1.0}, "valid": False,
         "reason": "dropout out of range"},
        {"config": {"model_kind": "gcn", "learning_rate": 0}, "valid": False,
         "reason": "non-positive lr"},
        {"config": {"model_kind": "mlp"}, "valid": False,
         "reason": "unknown model"},
        {"config": {"model_kind": "gcn", "num_layers": 0}, "valid": False,
         "reason": "no layers"},
        {"config": {"model_kind": "gcn", "hidden_dim": 0}, "valid": False,
         "reason": "no hidden units"},
    ],
}


def check_validation_cases() -> None:
    """The recorded expectations must match the server-side validators."""
    for case in VALIDATION_CASES["recipes"]:
        try:
            GraphRecipe.from_dict(case["recipe"])
            outcome = True
        except (RecipeError, TypeError):
            outcome = False
        assert outcome == case["valid"], f"recipe case drifted: {case}"
    for case in VALIDATION_CASES["model_configs"]:
        try:
            ModelConfig(**case["config"])
            outcome = True
        except (ValueError, TypeError):
            outcome = False
        assert outcome == case["valid"], f"config case drifted: {case}"


def main() -> None:
    FIXTURES_DIR.mkdir(parents=True, exist_ok=True)
    check_validation_cases()

    with tempfile.TemporaryDirectory() as tmp:
        manifest = make_cohort(Path(tmp) / "cohort", n_accessions=3,
                               variants_per_accession=12, seed=4)
        app = create_app(Path(tmp) / "ws")
        with TestClient(app) as client:
            def wait(job):
                while job["state"] not in ("succeeded", "failed"):
                    time.sleep(0.02)
                    job = client.get(f"/jobs/{job['job_id']}").json()
                assert job["state"] == "succeeded", job
                return job

            files = [("vcf", (p.name, p.read_bytes())) for p in manifest.vcf_paths]
            files += [("cadd", (p.name, p.read_bytes())) for p in manifest.cadd_paths]
            files += [("metadata", (manifest.metadata_path.name,
                                    manifest.metadata_path.read_bytes()))]
            enrich_job = wait(client.post("/enrich", files=files).json())

            all_accessions = client.get("/accessions").json()
            # ages are 40, 45, 50: the [44, 51) window keeps the last two
            age_filter = {"min_age": 44, "max_age": 51}
            filtered = client.get("/accessions", params=age_filter).json()
            oracle = sorted(a for a in manifest.accessions
                            if age_filter["min_age"] <= manifest.ages[a]
                            < age_filter["max_age"])

            features = ["position", "quality", "ann_split_1", "ref_genome",
                        "phred_score"]
            fetch_job = wait(client.post("/fetch", json={
                "accession_ids": manifest.accessions,
                "features": features}).json())
            table_id = fetch_job["artifacts"]["table_id"]
            table_info = client.get(f"/tables/{table_id}").json()

            graph_job = wait(client.post("/graphs", json={
                "table_id": table_id,
                "recipe": {
                    "feature_columns": ["position", "quality", "ref_genome"],
                    "label_column": "phred_score",
                    "gene_column": "ann_split_1",
                }}).json())

            train_job = wait(client.post("/train", json={
                "graph_id": graph_job["artifacts"]["graph_id"],
                "config": {"model_kind": "gcn", "epochs": 12, "seed": 2,
                           "learning_rate": 0.05}}).json())
            telemetry = client.get(f"/train/{train_job['job_id']}/telemetry").json()
            report = client.get(f"/train/{train_job['job_id']}/report").json()
            metrics = client.get(f"/inference/{train_job['job_id']}").json()

    fixtures = {
        "enrich_job.json": enrich_job,
        "accessions_all.json": all_accessions,
        "accessions_age_filter.json": {
            "params": age_filter,
            "response": filtered,
            "oracle_accessions": oracle,
        },
        "fetch_job.json": fetch_job,
        "table_info.json": table_info,
        "graph_job.json": graph_job,
        "train_job.json": train_job,
        "telemetry.json": telemetry,
        "report.json": report,
        "metrics.json": metrics,
        "validation_cases.json": VALIDATION_CASES,
    }
    for name, payload in fixtures.items():
        (FIXTURES_DIR / name).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"wrote {FIXTURES_DIR / name}")


if __name__ == "__main__":
    main()
