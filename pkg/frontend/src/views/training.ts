// Training & inference tab: live charts from the telemetry stream, the
// metrics table (per-class + macro/weighted with support), and the
// confusion-matrix heat grid. Every displayed number is a payload value.

import { lineChart } from "../charts.js";
import { TelemetrySeries } from "../state.js";
import { MetricsPayload } from "../types.js";
import { escapeHtml } from "./enrichment.js";

export function renderTrainingCharts(series: TelemetrySeries): string {
  return (
    lineChart("training and validation loss", [
      { name: "train loss", points: series.series("train_loss"), color: "#1f77b4" },
      { name: "val loss", points: series.series("val_loss"), color: "#d62728" },
    ]) +
    lineChart("validation accuracy", [
      { name: "val accuracy", points: series.series("val_accuracy"), color: "#2ca02c" },
    ]) +
    lineChart("process memory", [
      { name: "rss bytes", points: series.series("rss_bytes"), color: "#9467bd" },
    ])
  );
}

function metricCell(kind: string, name: string, value: number): string {
  return `<td data-metric="${kind}:${name}">${value.toFixed(4)}</td>`;
}

export function renderMetricsTable(metrics: MetricsPayload): string {
  const rows = metrics.per_class
    .map((row) =>
      `<tr><td>${escapeHtml(row.class)}</td>` +
      metricCell("precision", row.class, row.precision) +
      metricCell("recall", row.class, row.recall) +
      metricCell("f1", row.class, row.f1) +
      `<td data-metric="support:${escapeHtml(row.class)}">${row.support}</td></tr>`)
    .join("");
  const total = metrics.per_class.reduce((acc, row) => acc + row.support, 0);
  const aggregate = (name: "macro" | "weighted") =>
    `<tr class="aggregate"><td>${name}</td>` +
    metricCell("precision", name, metrics[name].precision) +
    metricCell("recall", name, metrics[name].recall) +
    metricCell("f1", name, metrics[name].f1) +
    `<td data-metric="support:${name}">${total}</td></tr>`;
  return (
    `<table class="metrics">` +
    `<thead><tr><th>class</th><th>precision</th><th>recall</th><th>f1</th>` +
    `<th>support</th></tr></thead>` +
    `<tbody>${rows}${aggregate("macro")}${aggregate("weighted")}</tbody></table>` +
    `<p>accuracy: <span data-metric="accuracy">${metrics.accuracy.toFixed(4)}</span></p>`
  );
}

export function renderConfusionMatrix(metrics: MetricsPayload): string {
  const cells = metrics.confusion_matrix;
  const peak = Math.max(1, ...cells.flat());
  const header = metrics.classes
    .map((c) => `<th scope="col">${escapeHtml(c)}</th>`)
    .join("");
  const body = cells
    .map((row, i) => {
      const tds = row
        .map((count, j) => {
          const heat = Math.round((count / peak) * 80);
          return `<td data-cell="${i},${j}" style="background:hsl(210 70% ${100 - heat}%)">` +
            `${count}</td>`;
        })
        .join("");
      return `<tr><th scope="row">${escapeHtml(metrics.classes[i])}</th>${tds}</tr>`;
    })
    .join("");
  return (
    `<table class="confusion" aria-label="confusion matrix, rows are true classes">` +
    `<thead><tr><th>true \\ predicted</th>${header}</tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}
