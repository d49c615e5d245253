// Service payload shapes. Every number the console displays originates from
// one of these payloads; the views never recompute them.

export type JobState = "queued" | "running" | "succeeded" | "failed";

export interface JobRecord {
  job_id: string;
  kind: "enrich" | "fetch" | "build" | "train";
  state: JobState;
  progress: number;
  error: string | null;
  artifacts: Record<string, unknown>;
}

export interface StoreStats {
  quad_count: number;
  graph_count: number;
  term_count: number;
}

export interface EnrichResult {
  per_accession: Record<string, { vcf_quads: number; cadd_triples: number }>;
  metadata_quads: number;
  quads_added: number;
  store: StoreStats;
}

export interface AccessionsResponse {
  accessions: string[];
}

export interface FetchResult {
  table_id: string;
  columns: string[];
  row_count: number;
}

export interface GraphSummary {
  features: string[];
  label: string;
  num_classes: number;
  num_nodes: number;
  num_edges: number;
  feature_dim: number;
  edge_policy: string;
  edge_weight_mode: string;
  bidirectional: boolean;
  split: [number, number, number];
}

export interface GraphResult {
  graph_id: string;
  summary: GraphSummary;
}

export interface TelemetryEvent {
  epoch: number;
  train_loss: number;
  val_loss: number;
  val_accuracy: number;
  rss_bytes: number;
}

export interface TelemetryResponse {
  events: TelemetryEvent[];
  state: JobState;
}

export interface TrainReport {
  train_loss: number[];
  val_loss: number[];
  val_accuracy: number[];
  rss_bytes: number[];
  wall_time_s: number;
  epochs_run: number;
  config: Record<string, unknown>;
}

export interface TrainResult {
  checkpoint_id: string;
  graph_id: string;
  report: TrainReport;
}

export interface ClassMetrics {
  class: string;
  precision: number;
  recall: number;
  f1: number;
  support: number;
}

export interface AggregateMetrics {
  precision: number;
  recall: number;
  f1: number;
}

export interface MetricsPayload {
  accuracy: number;
  per_class: ClassMetrics[];
  macro: AggregateMetrics;
  weighted: AggregateMetrics;
  confusion_matrix: number[][];
  classes: string[];
}

export interface ApiErrorBody {
  error: { code: string; message: string; details?: unknown };
}

export interface GraphRecipeDraft {
  feature_columns: string[];
  label_column: string;
  edge_policy: "gene_name" | "fully_connected";
  gene_column: string;
  edge_weight_mode: "constant" | "in_degree" | "user";
  edge_weight_value: number;
  bidirectional: boolean;
  train_pct: number;
  val_pct: number;
  seed: number;
  standardize: boolean;
}

export interface ModelConfigDraft {
  model_kind: "gcn" | "sage";
  num_layers: number;
  hidden_dim: number;
  dropout: number;
  learning_rate: number;
  epochs: number;
  seed: number;
}
