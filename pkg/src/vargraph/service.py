"""HTTP/JSON service for the three scenarios.

Long-running work (enrich, fetch, graph build, training) runs as background
jobs polled via /jobs/{id}; training additionally exposes an incremental
telemetry stream keyed by epoch offset.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .gnn import NumericError
from .mlgraph import RecipeError
from .workbench import (
    Workbench,
    WorkbenchError,
    metrics_payload,
    model_config_from_payload,
    recipe_from_payload,
    report_payload,
)

DEFAULT_ACCESSION_PATTERN = r"SRR\w+"


@dataclass
class Job:
    job_id: str
    kind: str  # enrich | fetch | build | train
    state: str = "queued"  # queued | running | succeeded | failed
    progress: float = 0.0
    error: str | None = None
    artifacts: dict[str, Any] = field(default_factory=dict)
    telemetry: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def to_dict(self) -> dict:
        with self.lock:
            return {
                "job_id": self.job_id,
                "kind": self.kind,
                "state": self.state,
                "progress": self.progress,
                "error": self.error,
                "artifacts": dict(self.artifacts),
            }


class JobRegistry:
    def __init__(self):
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def create(self, kind: str) -> Job:
        job = Job(job_id=uuid.uuid4().hex[:12], kind=kind)
        with self._lock:
            self._jobs[job.job_id] = job
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)


def _run_job(job: Job, work) -> None:
    def body():
        with job.lock:
            job.state = "running"
        try:
            artifacts = work(job)
        except (WorkbenchError, RecipeError, NumericError, ValueError) as exc:
            with job.lock:
                job.state = "failed"
                job.error = str(exc)
            return
        with job.lock:
            job.artifacts = artifacts
            job.progress = 1.0
            job.state = "succeeded"

    threading.Thread(target=body, daemon=True).start()


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details


class FetchRequest(BaseModel):
    accession_ids: list[str] | None = None
    min_age: float | None = None
    max_age: float | None = None
    features: list[str] | None = None


class GraphRequest(BaseModel):
    table_id: str
    recipe: dict


class TrainRequest(BaseModel):
    graph_id: str
    config: dict


def create_app(workspace: str | Path, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="vargraph service")
    bench = Workbench(workspace)
    jobs = JobRegistry()
    app.state.workbench = bench
    app.state.jobs = jobs

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError):
        payload = {"error": {"code": exc.code, "message": exc.message}}
        if exc.details is not None:
            payload["error"]["details"] = exc.details
        return JSONResponse(status_code=exc.status, content=payload)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "invalid_request", "message": str(exc.errors())}},
        )

    def get_job_or_404(job_id: str) -> Job:
        job = jobs.get(job_id)
        if job is None:
            raise ApiError(404, "unknown_job", f"no job {job_id!r}")
        return job

    @app.post("/enrich")
    async def enrich(
        vcf: list[UploadFile] = File(default=[]),
        cadd: list[UploadFile] = File(default=[]),
        metadata: list[UploadFile] = File(default=[]),
        accession_pattern: str = Form(default=DEFAULT_ACCESSION_PATTERN),
    ):
        if not vcf:
            raise ApiError(400, "no_files", "at least one VCF file is required")
        upload_dir = bench.workspace / "uploads"
        upload_dir.mkdir(exist_ok=True)

        saved: dict[str, list[Path]] = {"vcf": [], "cadd": [], "metadata": []}
        for kind, uploads in (("vcf", vcf), ("cadd", cadd), ("metadata", metadata)):
            for upload in uploads:
                target = upload_dir / Path(upload.filename or f"{kind}.dat").name
                target.write_bytes(await upload.read())
                saved[kind].append(target)

        job = jobs.create("enrich")

        def work(_job: Job) -> dict:
            return bench.enrich(
                saved["vcf"], saved["cadd"], saved["metadata"],
                accession_pattern=accession_pattern,
            )

        _run_job(job, work)
        return job.to_dict()

    @app.get("/accessions")
    def accessions(min_age: float | None = None, max_age: float | None = None):
        try:
            ids = bench.accessions(min_age, max_age)
        except WorkbenchError as exc:
            raise ApiError(400, exc.code, exc.message) from exc
        return {"accessions": ids}

    @app.post("/fetch")
    def fetch(request: FetchRequest):
        if request.features is not None and not request.features:
            raise ApiError(400, "no_features", "feature list cannot be empty")
        if request.accession_ids is not None and not request.accession_ids:
            raise ApiError(400, "no_accessions", "accession id list cannot be empty")
        # feature validation is synchronous so bad names 400 immediately
        try:
            bench_features = request.features
            if bench_features:
                from .queries import FEATURE_COLUMNS
                unknown = [f for f in bench_features if f not in FEATURE_COLUMNS]
                if unknown:
                    raise ApiError(
                        400, "unknown_feature",
                        f"unknown feature names {unknown}",
                        details={"valid": FEATURE_COLUMNS},
                    )
        except WorkbenchError as exc:
            raise ApiError(400, exc.code, exc.message) from exc

        job = jobs.create("fetch")

        def work(_job: Job) -> dict:
            table_id, table = bench.fetch(
                accession_ids=request.accession_ids,
                min_age=request.min_age,
                max_age=request.max_age,
                features=request.features,
            )
            return {
                "table_id": table_id,
                "columns": table.columns,
                "row_count": len(table.rows),
            }

        _run_job(job, work)
        return job.to_dict()

    @app.get("/tables/{table_id}")
    def table_info(table_id: str):
        try:
            table = bench.load_table(table_id)
        except WorkbenchError as exc:
            raise ApiError(404, exc.code, exc.message) from exc
        return {
            "table_id": table_id,
            "columns": table.columns,
            "row_count": len(table.rows),
        }

    @app.post("/graphs")
    def build_graph(request: GraphRequest):
        try:
            recipe = recipe_from_payload(request.recipe)
            table = bench.load_table(request.table_id)
            bench.precheck_recipe(table, recipe)
        except (RecipeError, ValueError) as exc:
            raise ApiError(400, "invalid_recipe", str(exc)) from exc
        except WorkbenchError as exc:
            raise ApiError(404, exc.code, exc.message) from exc

        job = jobs.create("build")

        def work(_job: Job) -> dict:
            graph_id, summary = bench.build_graph(request.table_id, recipe)
            return {"graph_id": graph_id, "summary": summary}

        _run_job(job, work)
        return job.to_dict()

    @app.post("/train")
    def train(request: TrainRequest):
        try:
            config = model_config_from_payload(request.config)
        except (TypeError, ValueError) as exc:
            raise ApiError(400, "invalid_config", str(exc)) from exc
        try:
            bench.load_graph(request.graph_id)
        except WorkbenchError as exc:
            raise ApiError(404, exc.code, exc.message) from exc

        job = jobs.create("train")

        def work(running: Job) -> dict:
            def telemetry(event):
                with running.lock:
                    running.telemetry.append(event.to_dict())
                    running.progress = (event.epoch + 1) / config.epochs

            checkpoint_id, report = bench.train(request.graph_id, config, telemetry)
            return {
                "checkpoint_id": checkpoint_id,
                "graph_id": request.graph_id,
                "report": report_payload(report),
            }

        _run_job(job, work)
        return job.to_dict()

    @app.get("/jobs/{job_id}")
    def job_state(job_id: str):
        return get_job_or_404(job_id).to_dict()

    @app.get("/train/{job_id}/telemetry")
    def telemetry(job_id: str, after: int = -1):
        job = get_job_or_404(job_id)
        with job.lock:
            events = [e for e in job.telemetry if e["epoch"] > after]
            state = job.state
        return {"events": events, "state": state}

    @app.get("/train/{job_id}/report")
    def report(job_id: str):
        job = get_job_or_404(job_id)
        snapshot = job.to_dict()
        if snapshot["state"] != "succeeded":
            raise ApiError(409, "not_finished", f"job is {snapshot['state']}")
        return snapshot["artifacts"]

    @app.get("/inference/{job_id}")
    def inference(job_id: str):
        job = get_job_or_404(job_id)
        snapshot = job.to_dict()
        if job.kind != "train":
            raise ApiError(409, "not_a_training_job", "inference needs a train job")
        if snapshot["state"] != "succeeded":
            raise ApiError(409, "not_finished", f"job is {snapshot['state']}")
        try:
            metrics = bench.inference(
                snapshot["artifacts"]["checkpoint_id"],
                snapshot["artifacts"]["graph_id"],
            )
        except WorkbenchError as exc:
            raise ApiError(404, exc.code, exc.message) from exc
        return metrics_payload(metrics)

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
