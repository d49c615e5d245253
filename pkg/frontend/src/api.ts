// Typed client over the service's JSON API.

import {
  AccessionsResponse,
  ApiErrorBody,
  JobRecord,
  MetricsPayload,
  TelemetryResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    const error = (body as ApiErrorBody).error ?? {
      code: "http_error",
      message: `HTTP ${response.status}`,
    };
    throw new ApiError(response.status, error.code, error.message);
  }
  return body as T;
}

export class ServiceClient {
  constructor(private readonly base: string = "") {}

  private url(path: string, params?: Record<string, string | number>): string {
    const query = params
      ? "?" + new URLSearchParams(
          Object.entries(params).map(([k, v]) => [k, String(v)]),
        ).toString()
      : "";
    return this.base + path + query;
  }

  async enrich(form: FormData): Promise<JobRecord> {
    return asJson(await fetch(this.url("/enrich"), { method: "POST", body: form }));
  }

  async accessions(minAge?: number, maxAge?: number): Promise<AccessionsResponse> {
    const params: Record<string, number> = {};
    if (minAge !== undefined) params.min_age = minAge;
    if (maxAge !== undefined) params.max_age = maxAge;
    return asJson(await fetch(this.url("/accessions", params)));
  }

  async fetchFeatures(body: {
    accession_ids?: string[];
    min_age?: number;
    max_age?: number;
    features: string[];
  }): Promise<JobRecord> {
    return asJson(await fetch(this.url("/fetch"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }));
  }

  async buildGraph(tableId: string, recipe: Record<string, unknown>): Promise<JobRecord> {
    return asJson(await fetch(this.url("/graphs"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ table_id: tableId, recipe }),
    }));
  }

  async train(graphId: string, config: Record<string, unknown>): Promise<JobRecord> {
    return asJson(await fetch(this.url("/train"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ graph_id: graphId, config }),
    }));
  }

  async job(jobId: string): Promise<JobRecord> {
    return asJson(await fetch(this.url(`/jobs/${jobId}`)));
  }

  // `after` is the resume offset: only events with epoch > after are returned
  async telemetry(jobId: string, after: number): Promise<TelemetryResponse> {
    return asJson(await fetch(this.url(`/train/${jobId}/telemetry`, { after })));
  }

  async inference(jobId: string): Promise<MetricsPayload> {
    return asJson(await fetch(this.url(`/inference/${jobId}`)));
  }

  async waitForJob(
    jobId: string,
    onPoll?: (job: JobRecord) => void,
    intervalMs = 150,
  ): Promise<JobRecord> {
    for (;;) {
      const job = await this.job(jobId);
      onPoll?.(job);
      if (job.state === "succeeded" || job.state === "failed") {
        return job;
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
