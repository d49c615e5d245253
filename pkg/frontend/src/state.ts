// Console state: tab flow, drafts, and the buffered telemetry series.

import { GraphRecipeDraft, ModelConfigDraft, TelemetryEvent } from "./types.js";

export type Tab = "enrichment" | "creation" | "training";

const TAB_ORDER: Tab[] = ["enrichment", "creation", "training"];

export function canNavigate(from: Tab, to: Tab, unlocked: Tab[]): boolean {
  // forward only into unlocked tabs; backward always allowed
  if (TAB_ORDER.indexOf(to) <= TAB_ORDER.indexOf(from)) return true;
  return unlocked.includes(to);
}

export function defaultRecipe(): GraphRecipeDraft {
  return {
    feature_columns: [],
    label_column: "",
    edge_policy: "gene_name",
    gene_column: "ann_split_1",
    edge_weight_mode: "constant",
    edge_weight_value: 1.0,
    bidirectional: true,
    train_pct: 80,
    val_pct: 10,
    seed: 0,
    standardize: true,
  };
}

export function defaultModelConfig(): ModelConfigDraft {
  return {
    model_kind: "gcn",
    num_layers: 1,
    hidden_dim: 16,
    dropout: 0.0,
    learning_rate: 0.01,
    epochs: 100,
    seed: 0,
  };
}

/** Telemetry buffer with a resume offset for reconnection. */
export class TelemetrySeries {
  readonly events: TelemetryEvent[] = [];

  get lastEpoch(): number {
    return this.events.length ? this.events[this.events.length - 1].epoch : -1;
  }

  /** Appends only events newer than what is buffered; returns newly added. */
  absorb(incoming: TelemetryEvent[]): TelemetryEvent[] {
    const fresh = incoming.filter((e) => e.epoch > this.lastEpoch);
    this.events.push(...fresh);
    return fresh;
  }

  series(key: "train_loss" | "val_loss" | "val_accuracy" | "rss_bytes"):
      [number, number][] {
    return this.events.map((e) => [e.epoch, e[key]] as [number, number]);
  }
}
