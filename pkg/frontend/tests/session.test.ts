import { describe, expect, it } from "vitest";
import { UiSession } from "../src/session.js";
import { splitLeaf } from "../src/tree_edit.js";
import type { ReportDoc, TreeDoc } from "../src/types.js";

const REPORT: ReportDoc = {
  mode: { trainingSet: {} },
  accuracy: 0.7,
  auc: 0.5,
  confusion: { tp: 7, fp: 3, fn: 0, tn: 0 },
  leaves: [],
  warnings: [],
};

function bareTree(): TreeDoc {
  return {
    id: "",
    name: "t",
    dataset_signature: "sig",
    root: { leaf: { label: "positive", total: 0, positive: 0 } },
  };
}

describe("ui session", () => {
  it("every edit invalidates the displayed report until the next evaluate", () => {
    const s = new UiSession(null);
    s.setTree(bareTree());
    expect(s.beginEvaluate()).toBe(true);
    s.finishEvaluate(REPORT);
    expect(s.report).toEqual(REPORT);
    expect(s.reportStale).toBe(false);

    s.editTree((t) => splitLeaf(t, "", { kind: "feature", feature: "g", threshold: 1 }));
    expect(s.report).toBeNull();
    expect(s.reportStale).toBe(true);

    expect(s.beginEvaluate()).toBe(true);
    s.finishEvaluate(REPORT);
    expect(s.reportStale).toBe(false);
  });

  it("debounces to a single in-flight evaluate call", () => {
    const s = new UiSession(null);
    expect(s.beginEvaluate()).toBe(true);
    expect(s.beginEvaluate()).toBe(false);
    s.finishEvaluate(null);
    expect(s.beginEvaluate()).toBe(true);
  });

  it("switching datasets clears the working tree and report", () => {
    const s = new UiSession(null);
    s.setTree(bareTree());
    s.finishEvaluate(REPORT);
    s.selectDataset("other");
    expect(s.workingTree).toBeNull();
    expect(s.report).toBeNull();
    expect(s.reportStale).toBe(false);
  });

  it("changing the mode invalidates the report", () => {
    const s = new UiSession(null);
    s.setTree(bareTree());
    s.finishEvaluate(REPORT);
    s.setMode({ percentageSplit: { fraction: 0.5, seed: 1 } });
    expect(s.report).toBeNull();
    expect(s.reportStale).toBe(true);
  });

  it("keeps the bearer token in session storage", () => {
    const s = new UiSession(window.sessionStorage);
    s.token = "tok-0123456789abcdef";
    expect(new UiSession(window.sessionStorage).token).toBe("tok-0123456789abcdef");
    s.token = null;
    expect(new UiSession(window.sessionStorage).token).toBeNull();
  });

  it("notifies listeners on every state change", () => {
    const s = new UiSession(null);
    let calls = 0;
    s.onChange(() => calls++);
    s.setTree(bareTree());
    s.setMode({ trainingSet: {} });
    s.finishEvaluate(REPORT);
    expect(calls).toBe(3);
  });
});
