// Graph-creation tab: feature/label pickers, edge options, split sliders,
// and the summary panel mirroring the service's graph summary.

import { testSplit } from "../validate.js";
import { GraphRecipeDraft, GraphSummary } from "../types.js";
import { escapeHtml } from "./enrichment.js";

export function labelChoices(columns: string[], features: string[]): string[] {
  // the label picker excludes anything already chosen as a feature
  return columns.filter((c) => !features.includes(c));
}

export function renderFeaturePicker(columns: string[], draft: GraphRecipeDraft): string {
  const feature_items = columns
    .map((c) => {
      const checked = draft.feature_columns.includes(c) ? " checked" : "";
      return `<li><label><input type="checkbox" data-feature="${escapeHtml(c)}"${checked}> ` +
        `${escapeHtml(c)}</label></li>`;
    })
    .join("");
  const label_options = labelChoices(columns, draft.feature_columns)
    .map((c) => {
      const selected = draft.label_column === c ? " selected" : "";
      return `<option value="${escapeHtml(c)}"${selected}>${escapeHtml(c)}</option>`;
    })
    .join("");
  return (
    `<fieldset><legend>node features</legend><ul>${feature_items}</ul></fieldset>` +
    `<label>class label <select data-role="label">${label_options}</select></label>`
  );
}

export function renderSplitControls(draft: GraphRecipeDraft): string {
  const test = testSplit(draft.train_pct, draft.val_pct);
  return (
    `<label>train <input type="range" min="0" max="100" value="${draft.train_pct}"` +
    ` data-role="train-pct"> <span data-cell="train">${draft.train_pct}</span>%</label>` +
    `<label>val <input type="range" min="0" max="100" value="${draft.val_pct}"` +
    ` data-role="val-pct"> <span data-cell="val">${draft.val_pct}</span>%</label>` +
    `<p>test share (computed in the backend): <span data-cell="test">${test}</span>%</p>`
  );
}

export function renderGraphSummary(summary: GraphSummary): string {
  const fields: [string, string | number][] = [
    ["features", summary.features.join(", ")],
    ["label", summary.label],
    ["classes", summary.num_classes],
    ["nodes", summary.num_nodes],
    ["edges", summary.num_edges],
    ["feature dim", summary.feature_dim],
    ["edge policy", summary.edge_policy],
    ["weight mode", summary.edge_weight_mode],
    ["bidirectional", String(summary.bidirectional)],
    ["split", summary.split.join(":")],
  ];
  const rows = fields
    .map(([name, value]) =>
      `<tr><th>${name}</th><td data-field="${name.replace(/ /g, "_")}">` +
      `${escapeHtml(String(value))}</td></tr>`)
    .join("");
  return `<table class="graph-summary"><tbody>${rows}</tbody></table>`;
}
