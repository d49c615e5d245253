"""Service API: full pipeline end-to-end plus the error contract."""

import time

import pytest
from fastapi.testclient import TestClient

from vargraph.cohort import make_cohort
from vargraph.service import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "workspace")
    with TestClient(app) as test_client:
        yield test_client


def _wait(client, job, timeout=120.0):
    deadline = time.time() + timeout
    while job["state"] not in ("succeeded", "failed"):
        assert time.time() < deadline, f"job timed out: {job}"
        time.sleep(0.02)
        job = client.get(f"/jobs/{job['job_id']}").json()
    return job


def _enrich_cohort(client, tmp_path, **kwargs):
    manifest = make_cohort(tmp_path / "cohort", **kwargs)
    files = [("vcf", (p.name, p.read_bytes())) for p in manifest.vcf_paths]
    files += [("cadd", (p.name, p.read_bytes())) for p in manifest.cadd_paths]
    files += [("metadata", (manifest.metadata_path.name,
                            manifest.metadata_path.read_bytes()))]
    job = client.post("/enrich", files=files).json()
    return manifest, _wait(client, job)


def test_enrich_accessions_fetch_graph_train_inference(client, tmp_path):
    manifest, job = _enrich_cohort(client, tmp_path, n_accessions=3,
                                   variants_per_accession=12)
    assert job["state"] == "succeeded"
    per_accession = job["artifacts"]["per_accession"]
    assert sorted(per_accession) == sorted(manifest.accessions)
    assert job["artifacts"]["quads_added"] > 0

    listed = client.get("/accessions").json()["accessions"]
    assert sorted(listed) == sorted(manifest.accessions)

    # age filter: ages are 40, 45, 50
    filtered = client.get("/accessions", params={"min_age": 44, "max_age": 46}).json()
    assert len(filtered["accessions"]) == 1

    fetch_job = client.post("/fetch", json={
        "accession_ids": manifest.accessions,
        "features": ["accession_id", "position", "quality", "ann_split_1",
                     "ref_genome", "phred_score"],
    }).json()
    fetch_job = _wait(client, fetch_job)
    assert fetch_job["state"] == "succeeded"
    table_id = fetch_job["artifacts"]["table_id"]
    assert fetch_job["artifacts"]["row_count"] == manifest.total_variants

    info = client.get(f"/tables/{table_id}").json()
    assert info["columns"][0] == "accession_id"

    graph_job = client.post("/graphs", json={
        "table_id": table_id,
        "recipe": {
            "feature_columns": ["position", "quality", "ref_genome"],
            "label_column": "phred_score",
            "gene_column": "ann_split_1",
        },
    }).json()
    graph_job = _wait(client, graph_job)
    assert graph_job["state"] == "succeeded"
    summary = graph_job["artifacts"]["summary"]
    assert summary["num_nodes"] == manifest.total_variants
    graph_id = graph_job["artifacts"]["graph_id"]

    train_job = client.post("/train", json={
        "graph_id": graph_id,
        "config": {"model_kind": "gcn", "epochs": 15, "seed": 3,
                   "learning_rate": 0.05},
    }).json()
    train_job = _wait(client, train_job)
    assert train_job["state"] == "succeeded"

    telemetry = client.get(f"/train/{train_job['job_id']}/telemetry").json()
    epochs = [e["epoch"] for e in telemetry["events"]]
    assert epochs == list(range(15))

    report = client.get(f"/train/{train_job['job_id']}/report").json()
    assert report["report"]["epochs_run"] == 15
    assert report["checkpoint_id"]

    metrics = client.get(f"/inference/{train_job['job_id']}").json()
    assert 0.0 <= metrics["accuracy"] <= 1.0
    assert len(metrics["per_class"]) == summary["num_classes"]
    assert all("support" in row for row in metrics["per_class"])
    confusion = metrics["confusion_matrix"]
    assert sum(sum(row) for row in confusion) == sum(
        r["support"] for r in metrics["per_class"]
    )


def test_enrich_without_files_is_400(client):
    response = client.post("/enrich", files=[])
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "no_files"


def test_enrich_is_idempotent(client, tmp_path):
    manifest, job1 = _enrich_cohort(client, tmp_path, n_accessions=2,
                                    variants_per_accession=5)
    total_after_first = job1["artifacts"]["store"]["quad_count"]

    files = [("vcf", (p.name, p.read_bytes())) for p in manifest.vcf_paths]
    files += [("cadd", (p.name, p.read_bytes())) for p in manifest.cadd_paths]
    job2 = _wait(client, client.post("/enrich", files=files).json())
    assert job2["artifacts"]["quads_added"] == 0
    assert job2["artifacts"]["store"]["quad_count"] == total_after_first


def test_enrich_quads_match_conversion_oracle(client, tmp_path):
    """10-file cohort: loaded quads equal an independent conversion count."""
    manifest, job = _enrich_cohort(client, tmp_path, n_accessions=10,
                                   variants_per_accession=6)
    from vargraph.convert import build_cadd_index, cadd_to_triples, vcf_to_quads
    from vargraph.ingest import parse_cadd_tsv, parse_vcf

    expected = 0
    for vcf_path, cadd_path in zip(manifest.vcf_paths, manifest.cadd_paths):
        accession = vcf_path.stem
        header, records = parse_vcf(vcf_path)
        cadds = list(parse_cadd_tsv(cadd_path))
        expected += len(list(vcf_to_quads(
            list(records), header, accession,
            cadd_index=build_cadd_index(cadds))))
        expected += len(list(cadd_to_triples(cadds, accession)))
    per_accession = job["artifacts"]["per_accession"]
    got = sum(v["vcf_quads"] + v["cadd_triples"] for v in per_accession.values())
    assert got == expected


def test_accessions_bad_range_is_400(client):
    response = client.get("/accessions", params={"min_age": 70, "max_age": 60})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "invalid_age_range"


def test_fetch_unknown_feature_is_400_with_valid_names(client):
    response = client.post("/fetch", json={"accession_ids": ["SRRX"],
                                           "features": ["nope"]})
    assert response.status_code == 400
    body = response.json()["error"]
    assert body["code"] == "unknown_feature"
    assert "position" in body["details"]["valid"]


def test_fetch_empty_accession_list_is_400(client):
    response = client.post("/fetch", json={"accession_ids": []})
    assert response.status_code == 400


def test_graph_cap_violation_is_400(client, tmp_path):
    manifest, _ = _enrich_cohort(client, tmp_path, n_accessions=1,
                                 variants_per_accession=12)
    fetch_job = _wait(client, client.post("/fetch", json={
        "accession_ids": manifest.accessions,
        "features": ["position", "phred_score"],
    }).json())
    table_id = fetch_job["artifacts"]["table_id"]
    response = client.post("/graphs", json={
        "table_id": table_id,
        "recipe": {
            "feature_columns": ["position"],
            "label_column": "phred_score",
            "edge_policy": "fully_connected",
            "fully_connected_cap": 5,
        },
    })
    assert response.status_code == 400
    assert "O(n^2)" in response.json()["error"]["message"]


def test_invalid_recipe_is_400(client, tmp_path):
    response = client.post("/graphs", json={
        "table_id": "whatever",
        "recipe": {"feature_columns": ["a"], "label_column": "a"},
    })
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "invalid_recipe"


def test_invalid_train_config_is_400(client):
    response = client.post("/train", json={"graph_id": "g", "config": {"epochs": 0}})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "invalid_config"


def test_inference_before_success_is_409(client, tmp_path):
    manifest, _ = _enrich_cohort(client, tmp_path, n_accessions=1,
                                 variants_per_accession=8)
    fetch_job = _wait(client, client.post("/fetch", json={
        "accession_ids": manifest.accessions,
        "features": ["position", "phred_score", "ann_split_1"],
    }).json())
    graph_job = _wait(client, client.post("/graphs", json={
        "table_id": fetch_job["artifacts"]["table_id"],
        "recipe": {"feature_columns": ["position"], "label_column": "phred_score",
                   "gene_column": "ann_split_1"},
    }).json())
    # a fetch job is not a training job
    response = client.get(f"/inference/{graph_job['job_id']}")
    assert response.status_code == 409

    response = client.get("/inference/doesnotexist")
    assert response.status_code == 404


def test_job_polling_is_stable_after_terminal(client, tmp_path):
    _, job = _enrich_cohort(client, tmp_path, n_accessions=1,
                            variants_per_accession=4)
    snapshot1 = client.get(f"/jobs/{job['job_id']}").json()
    snapshot2 = client.get(f"/jobs/{job['job_id']}").json()
    assert snapshot1 == snapshot2
    assert snapshot1["state"] == "succeeded"


def test_same_seed_training_gives_identical_loss_curves(client, tmp_path):
    manifest, _ = _enrich_cohort(client, tmp_path, n_accessions=2,
                                 variants_per_accession=10)
    fetch_job = _wait(client, client.post("/fetch", json={
        "accession_ids": manifest.accessions,
        "features": ["position", "quality", "ann_split_1", "phred_score"],
    }).json())
    graph_job = _wait(client, client.post("/graphs", json={
        "table_id": fetch_job["artifacts"]["table_id"],
        "recipe": {"feature_columns": ["position", "quality"],
                   "label_column": "phred_score", "gene_column": "ann_split_1"},
    }).json())
    graph_id = graph_job["artifacts"]["graph_id"]
    config = {"model_kind": "sage", "epochs": 10, "seed": 5, "learning_rate": 0.05}
    reports = []
    for _ in range(2):
        train_job = _wait(client, client.post("/train", json={
            "graph_id": graph_id, "config": config}).json())
        reports.append(train_job["artifacts"]["report"])
    assert reports[0]["train_loss"] == reports[1]["train_loss"]
    assert reports[0]["val_loss"] == reports[1]["val_loss"]
