// Console bootstrap: wires the three tabs to the service client.

import { ApiError, ServiceClient } from "./api.js";
import {
  TelemetrySeries,
  Tab,
  canNavigate,
  defaultModelConfig,
  defaultRecipe,
} from "./state.js";
import {
  AgeFilterDraft,
  renderAccessionList,
  renderEnrichSummary,
  validateAgeFilter,
} from "./views/enrichment.js";
import {
  renderFeaturePicker,
  renderGraphSummary,
  renderSplitControls,
} from "./views/creation.js";
import {
  renderConfusionMatrix,
  renderMetricsTable,
  renderTrainingCharts,
} from "./views/training.js";
import {
  EnrichResult,
  FetchResult,
  GraphResult,
  MetricsPayload,
  TrainResult,
} from "./types.js";
import { validateModelConfig, validateRecipe } from "./validate.js";

const client = new ServiceClient("");

const state = {
  tab: "enrichment" as Tab,
  unlocked: ["enrichment"] as Tab[],
  selectedAccessions: [] as string[],
  ageFilter: {} as AgeFilterDraft,
  tableColumns: [] as string[],
  tableId: "",
  recipe: defaultRecipe(),
  graphId: "",
  modelConfig: defaultModelConfig(),
  trainJobId: "",
  telemetry: new TelemetrySeries(),
};

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function setStatus(text: string, isError = false): void {
  const node = el("status");
  node.textContent = text;
  node.className = isError ? "status error" : "status";
}

function switchTab(to: Tab): void {
  if (!canNavigate(state.tab, to, state.unlocked)) return;
  state.tab = to;
  for (const tab of ["enrichment", "creation", "training"] as Tab[]) {
    el(`tab-${tab}`).hidden = tab !== to;
    el(`nav-${tab}`).classList.toggle("active", tab === to);
  }
}

function unlock(tab: Tab): void {
  if (!state.unlocked.includes(tab)) state.unlocked.push(tab);
}

async function refreshAccessions(): Promise<void> {
  const errors = validateAgeFilter(state.ageFilter);
  if (errors.length) {
    setStatus(errors.join("; "), true);
    return;
  }
  const response = await client.accessions(
    state.ageFilter.minAge, state.ageFilter.maxAge,
  );
  el("accession-list").innerHTML = renderAccessionList(
    response.accessions, state.selectedAccessions,
  );
  el("accession-list").querySelectorAll("input[data-accession]").forEach((box) => {
    box.addEventListener("change", () => {
      const accession = (box as HTMLInputElement).dataset.accession!;
      if ((box as HTMLInputElement).checked) {
        state.selectedAccessions.push(accession);
      } else {
        state.selectedAccessions = state.selectedAccessions.filter(
          (a) => a !== accession,
        );
      }
    });
  });
}

async function onUpload(event: Event): Promise<void> {
  event.preventDefault();
  const form = new FormData(el("upload-form") as HTMLFormElement);
  setStatus("uploading…");
  try {
    const job = await client.enrich(form);
    const done = await client.waitForJob(job.job_id);
    if (done.state === "failed") throw new ApiError(500, "job_failed", done.error ?? "");
    el("enrich-summary").innerHTML = renderEnrichSummary(
      done.artifacts as unknown as EnrichResult,
    );
    setStatus("knowledge graph enriched");
    await refreshAccessions();
  } catch (error) {
    setStatus(String(error), true);
  }
}

async function onFetch(): Promise<void> {
  const features = ["position", "quality", "ref_genome", "alt_genome",
                    "ann_split_1", "phred_score"];
  setStatus("fetching features…");
  try {
    const job = await client.fetchFeatures({
      accession_ids: state.selectedAccessions.length
        ? state.selectedAccessions : undefined,
      min_age: state.ageFilter.minAge,
      max_age: state.ageFilter.maxAge,
      features,
    });
    const done = await client.waitForJob(job.job_id);
    if (done.state === "failed") throw new ApiError(500, "job_failed", done.error ?? "");
    const result = done.artifacts as unknown as FetchResult;
    state.tableId = result.table_id;
    state.tableColumns = result.columns;
    setStatus(`fetched ${result.row_count} rows`);
    unlock("creation");
    renderCreation();
    switchTab("creation");
  } catch (error) {
    setStatus(String(error), true);
  }
}

function renderCreation(): void {
  el("feature-picker").innerHTML = renderFeaturePicker(state.tableColumns, state.recipe);
  el("split-controls").innerHTML = renderSplitControls(state.recipe);
  el("feature-picker").querySelectorAll("input[data-feature]").forEach((box) => {
    box.addEventListener("change", () => {
      const column = (box as HTMLInputElement).dataset.feature!;
      if ((box as HTMLInputElement).checked) {
        state.recipe.feature_columns.push(column);
      } else {
        state.recipe.feature_columns = state.recipe.feature_columns.filter(
          (c) => c !== column,
        );
      }
      renderCreation();
    });
  });
  const label = el("feature-picker").querySelector("select[data-role=label]");
  label?.addEventListener("change", () => {
    state.recipe.label_column = (label as HTMLSelectElement).value;
  });
  for (const [role, key] of [["train-pct", "train_pct"], ["val-pct", "val_pct"]] as const) {
    const slider = el("split-controls").querySelector(`input[data-role=${role}]`);
    slider?.addEventListener("input", () => {
      state.recipe[key] = Number((slider as HTMLInputElement).value);
      renderCreation();
    });
  }
}

async function onBuildGraph(): Promise<void> {
  const errors = validateRecipe(state.recipe);
  if (errors.length) {
    setStatus(errors.join("; "), true);
    return;
  }
  setStatus("building graph…");
  try {
    const job = await client.buildGraph(state.tableId, { ...state.recipe });
    const done = await client.waitForJob(job.job_id);
    if (done.state === "failed") throw new ApiError(500, "job_failed", done.error ?? "");
    const result = done.artifacts as unknown as GraphResult;
    state.graphId = result.graph_id;
    el("graph-summary").innerHTML = renderGraphSummary(result.summary);
    setStatus(`graph ${result.graph_id} ready`);
    unlock("training");
  } catch (error) {
    setStatus(String(error), true);
  }
}

async function onTrain(): Promise<void> {
  const errors = validateModelConfig(state.modelConfig);
  if (errors.length) {
    setStatus(errors.join("; "), true);
    return;
  }
  setStatus("training…");
  state.telemetry = new TelemetrySeries();
  try {
    const job = await client.train(state.graphId, { ...state.modelConfig });
    state.trainJobId = job.job_id;
    let current = job;
    while (current.state === "queued" || current.state === "running") {
      // resume from the last buffered epoch; reconnects never lose points
      const stream = await client.telemetry(job.job_id, state.telemetry.lastEpoch);
      if (state.telemetry.absorb(stream.events).length) {
        el("charts").innerHTML = renderTrainingCharts(state.telemetry);
      }
      await new Promise((resolve) => setTimeout(resolve, 200));
      current = await client.job(job.job_id);
    }
    if (current.state === "failed") throw new ApiError(500, "job_failed", current.error ?? "");
    const tail = await client.telemetry(job.job_id, state.telemetry.lastEpoch);
    state.telemetry.absorb(tail.events);
    el("charts").innerHTML = renderTrainingCharts(state.telemetry);
    const result = current.artifacts as unknown as TrainResult;
    setStatus(`training finished (checkpoint ${result.checkpoint_id})`);
    const metrics: MetricsPayload = await client.inference(job.job_id);
    el("metrics").innerHTML = renderMetricsTable(metrics);
    el("confusion").innerHTML = renderConfusionMatrix(metrics);
  } catch (error) {
    setStatus(String(error), true);
  }
}

function bindModelForm(): void {
  const bindings: [string, keyof typeof state.modelConfig, (v: string) => unknown][] = [
    ["model-kind", "model_kind", String],
    ["num-layers", "num_layers", Number],
    ["hidden-dim", "hidden_dim", Number],
    ["dropout", "dropout", Number],
    ["learning-rate", "learning_rate", Number],
    ["epochs", "epochs", Number],
    ["seed", "seed", Number],
  ];
  for (const [id, key, cast] of bindings) {
    const input = el(id) as HTMLInputElement;
    input.addEventListener("change", () => {
      (state.modelConfig as unknown as Record<string, unknown>)[key] = cast(input.value);
    });
  }
}

export function boot(): void {
  for (const tab of ["enrichment", "creation", "training"] as Tab[]) {
    el(`nav-${tab}`).addEventListener("click", () => switchTab(tab));
  }
  el("upload-form").addEventListener("submit", onUpload);
  el("refresh-accessions").addEventListener("click", refreshAccessions);
  el("min-age").addEventListener("change", (event) => {
    const value = (event.target as HTMLInputElement).value;
    state.ageFilter.minAge = value === "" ? undefined : Number(value);
  });
  el("max-age").addEventListener("change", (event) => {
    const value = (event.target as HTMLInputElement).value;
    state.ageFilter.maxAge = value === "" ? undefined : Number(value);
  });
  el("fetch-button").addEventListener("click", onFetch);
  el("build-button").addEventListener("click", onBuildGraph);
  el("train-button").addEventListener("click", onTrain);
  bindModelForm();
  switchTab("enrichment");
  refreshAccessions().catch((error) => setStatus(String(error), true));
}

if (typeof document !== "undefined" && document.getElementById("nav-enrichment")) {
  boot();
}
