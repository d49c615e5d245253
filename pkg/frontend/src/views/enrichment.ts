// Enrichment tab: upload summary and accession selection (by list or age).

import { EnrichResult } from "../types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderAccessionList(accessions: string[], selected: string[]): string {
  if (accessions.length === 0) {
    return `<p class="empty-state">The knowledge graph is empty. Upload VCF ` +
      `files (with optional CADD scores and metadata) to begin.</p>`;
  }
  const items = accessions
    .map((a) => {
      const checked = selected.includes(a) ? " checked" : "";
      return `<li><label><input type="checkbox" data-accession="${escapeHtml(a)}"${checked}> ` +
        `${escapeHtml(a)}</label></li>`;
    })
    .join("");
  return `<ul class="accession-list">${items}</ul>`;
}

export function renderEnrichSummary(result: EnrichResult): string {
  const rows = Object.entries(result.per_accession)
    .sort(([a], [b]) => (a < b ? -1 : 1))
    .map(([accession, counts]) =>
      `<tr><td>${escapeHtml(accession)}</td>` +
      `<td data-cell="vcf_quads">${counts.vcf_quads}</td>` +
      `<td data-cell="cadd_triples">${counts.cadd_triples}</td></tr>`)
    .join("");
  return (
    `<table class="enrich-summary">` +
    `<thead><tr><th>accession</th><th>VCF quads</th><th>CADD triples</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>` +
    `<p>metadata quads: <span data-cell="metadata_quads">${result.metadata_quads}</span> · ` +
    `quads added: <span data-cell="quads_added">${result.quads_added}</span> · ` +
    `store total: <span data-cell="quad_count">${result.store.quad_count}</span></p>`
  );
}

export interface AgeFilterDraft {
  minAge?: number;
  maxAge?: number;
}

export function validateAgeFilter(draft: AgeFilterDraft): string[] {
  if (
    draft.minAge !== undefined &&
    draft.maxAge !== undefined &&
    draft.minAge > draft.maxAge
  ) {
    return ["minimum age exceeds maximum age"];
  }
  return [];
}
