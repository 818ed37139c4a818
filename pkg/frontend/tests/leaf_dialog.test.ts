import { describe, expect, it } from "vitest";
import { EMPTY_LEAF_MESSAGE, leafSummary, renderLeafDialog } from "../src/leaf_dialog.js";
import { splitLeaf } from "../src/tree_edit.js";
import type { LeafStatDoc } from "../src/types.js";
import { client, container, demoDataset, majorityLeafTree } from "./helpers.js";

describe("leaf dialog", () => {
  it("formats fraction and accuracy as percentages", () => {
    const stat: LeafStatDoc = {
      path: "L",
      count: 5,
      fraction: 0.25,
      accuracy: 0.9,
      label: "positive",
    };
    expect(leafSummary(stat)).toBe("25.0% of samples, 90.0% accurate");
  });

  it("reports an unreached leaf explicitly", () => {
    const stat: LeafStatDoc = { path: "R", count: 0, fraction: 0, label: "negative" };
    expect(leafSummary(stat)).toBe(EMPTY_LEAF_MESSAGE);
  });

  it("renders summary, predicted label, and the rule path", () => {
    const host = container();
    renderLeafDialog(
      host,
      { path: "LR", count: 4, fraction: 0.4, accuracy: 0.75, label: "negative" },
      ["gene_a < 5 [low]", "grade ∈ {high} [high]"],
    );
    expect(host.querySelector(".leaf-summary")?.textContent).toBe(
      "40.0% of samples, 75.0% accurate",
    );
    expect(host.querySelector(".leaf-label")?.textContent).toBe("predicts: negative");
    const steps = [...host.querySelectorAll(".leaf-rule-path li")].map((li) => li.textContent);
    expect(steps).toEqual(["gene_a < 5 [low]", "grade ∈ {high} [high]"]);
  });

  it("live report: populated and unreached leaves from a real evaluation", async () => {
    const api = client();
    const demo = await demoDataset(api);
    // threshold below every gene_a value: the left leaf never receives samples
    const tree = splitLeaf(majorityLeafTree(demo.signature, "dialog"), "", {
      kind: "feature",
      feature: "gene_a",
      threshold: -100,
    });
    const saved = await api.saveTree(tree, "public");
    const report = await api.evaluate(saved.tree.id, { trainingSet: {} }, demo.id);
    const unreached = report.leaves.find((l) => l.path === "L");
    const populated = report.leaves.find((l) => l.path === "R");
    expect(unreached && leafSummary(unreached)).toBe(EMPTY_LEAF_MESSAGE);
    expect(populated && leafSummary(populated)).toBe("100.0% of samples, 70.0% accurate");
  });
});
