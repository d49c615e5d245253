// Client-side validation mirroring the server's invariants, so drafts the
// server would reject never leave the form. Asserted against the shared
// validation fixtures in tests.

import { GraphRecipeDraft, ModelConfigDraft } from "./types.js";

export function validateRecipe(draft: Partial<GraphRecipeDraft>): string[] {
  const errors: string[] = [];
  const features = draft.feature_columns ?? [];
  if (features.length === 0) {
    errors.push("select at least one feature column");
  }
  if (!draft.label_column) {
    errors.push("select a class label");
  } else if (features.includes(draft.label_column)) {
    errors.push("label column cannot also be a feature");
  }
  const train = draft.train_pct ?? 80;
  const val = draft.val_pct ?? 10;
  if (train < 0 || val < 0) {
    errors.push("split percentages must be non-negative");
  }
  if (train + val > 100) {
    errors.push("train + val percentages exceed 100");
  }
  if (draft.edge_policy !== undefined &&
      !["gene_name", "fully_connected"].includes(draft.edge_policy)) {
    errors.push(`unknown edge policy ${draft.edge_policy}`);
  }
  if (draft.edge_weight_mode !== undefined &&
      !["constant", "in_degree", "user"].includes(draft.edge_weight_mode)) {
    errors.push(`unknown edge weight mode ${draft.edge_weight_mode}`);
  }
  return errors;
}

export function validateModelConfig(draft: Partial<ModelConfigDraft>): string[] {
  const errors: string[] = [];
  if (draft.model_kind !== undefined && !["gcn", "sage"].includes(draft.model_kind)) {
    errors.push(`unknown model kind ${draft.model_kind}`);
  }
  if (draft.num_layers !== undefined && draft.num_layers < 1) {
    errors.push("number of layers must be at least 1");
  }
  if (draft.hidden_dim !== undefined && draft.hidden_dim < 1) {
    errors.push("hidden dimension must be at least 1");
  }
  if (draft.dropout !== undefined && (draft.dropout < 0 || draft.dropout >= 1)) {
    errors.push("dropout must be in [0, 1)");
  }
  if (draft.learning_rate !== undefined && draft.learning_rate <= 0) {
    errors.push("learning rate must be positive");
  }
  if (draft.epochs !== undefined && draft.epochs < 1) {
    errors.push("epochs must be at least 1");
  }
  return errors;
}

// The backend derives the test share; the console only ever displays it.
export function testSplit(trainPct: number, valPct: number): number {
  return 100 - trainPct - valPct;
}
