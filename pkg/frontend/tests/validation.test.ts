// Shared validation spec: the client-side validators must agree with the
// server-recorded expectations, so no draft the server rejects passes here.

import { describe, expect, it } from "vitest";

import { validateModelConfig, validateRecipe } from "../src/validate.js";
import { fixture } from "./fixtures.js";

interface ValidationCases {
  recipes: { recipe: Record<string, unknown>; valid: boolean; reason?: string }[];
  model_configs: { config: Record<string, unknown>; valid: boolean; reason?: string }[];
}

describe("shared validation fixtures", () => {
  const cases = fixture<ValidationCases>("validation_cases.json");

  it("recipe validation matches the server outcomes", () => {
    for (const entry of cases.recipes) {
      const errors = validateRecipe(entry.recipe as never);
      const label = entry.reason ?? JSON.stringify(entry.recipe);
      if (entry.valid) {
        expect(errors, label).toHaveLength(0);
      } else {
        expect(errors.length, label).toBeGreaterThan(0);
      }
    }
  });

  it("model config validation matches the server outcomes", () => {
    for (const entry of cases.model_configs) {
      const errors = validateModelConfig(entry.config as never);
      const label = entry.reason ?? JSON.stringify(entry.config);
      if (entry.valid) {
        expect(errors, label).toHaveLength(0);
      } else {
        expect(errors.length, label).toBeGreaterThan(0);
      }
    }
  });
});
