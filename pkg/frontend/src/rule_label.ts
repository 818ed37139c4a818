import type { RuleDoc } from "./types.js";

/** Compact one-line summary of a split rule for node labels. */
export function summarizeRule(rule: RuleDoc): string {
  switch (rule.kind) {
    case "feature":
      if (rule.threshold !== undefined) return `${rule.feature} < ${compact(rule.threshold)}`;
      return `${rule.feature} ∈ {${(rule.left_categories ?? []).join(", ")}}`;
    case "custom": {
      const terms = Object.entries(rule.weights)
        .map(([f, w]) => `${compact(w)}·${f}`)
        .join(" + ");
      const base = terms ? terms : String(compact(rule.offset));
      return `${base} < ${compact(rule.threshold)}`;
    }
    case "model":
      return rule.model.kind === "stump"
        ? `stump(${rule.model.feature})`
        : `logreg(${rule.model.features.join(", ")})`;
    case "treeref":
      return `tree ${rule.tree_id}`;
    case "visual":
      return `regions(${rule.feature_x}, ${rule.feature_y})`;
  }
}

function compact(x: number): string {
  const rounded = Math.round(x * 1000) / 1000;
  return String(rounded);
}
