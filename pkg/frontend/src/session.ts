import type { ModeDoc, ReportDoc, TreeDoc } from "./types.js";

export type SessionListener = () => void;

/**
 * Client-side state for one browser tab: the selected dataset, the working
 * tree, the chosen evaluation mode, and the latest report. Any tree edit
 * marks the report stale and clears it from display until the next
 * evaluation round-trip; at most one evaluate call is in flight at a time.
 */
export class UiSession {
  datasetId: string | null = null;
  workingTree: TreeDoc | null = null;
  mode: ModeDoc = { trainingSet: {} };
  report: ReportDoc | null = null;
  reportStale = false;

  private evaluating = false;
  private listeners: SessionListener[] = [];
  private storage: Storage | null;

  constructor(storage: Storage | null = null) {
    this.storage = storage ?? (typeof sessionStorage !== "undefined" ? sessionStorage : null);
  }

  get token(): string | null {
    return this.storage?.getItem("branch.token") ?? null;
  }

  set token(value: string | null) {
    if (!this.storage) return;
    if (value) this.storage.setItem("branch.token", value);
    else this.storage.removeItem("branch.token");
  }

  onChange(fn: SessionListener): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  selectDataset(id: string): void {
    this.datasetId = id;
    this.workingTree = null;
    this.report = null;
    this.reportStale = false;
    this.emit();
  }

  setTree(tree: TreeDoc): void {
    this.workingTree = tree;
    this.invalidateReport();
  }

  /** Every edit invalidates the displayed report until the next evaluate. */
  editTree(edit: (tree: TreeDoc) => TreeDoc): void {
    if (!this.workingTree) throw new Error("no working tree");
    this.workingTree = edit(this.workingTree);
    this.invalidateReport();
  }

  invalidateReport(): void {
    if (this.report !== null) this.reportStale = true;
    this.report = null;
    this.emit();
  }

  setMode(mode: ModeDoc): void {
    this.mode = mode;
    this.invalidateReport();
  }

  /** Returns false when an evaluate call is already in flight (debounce). */
  beginEvaluate(): boolean {
    if (this.evaluating) return false;
    this.evaluating = true;
    return true;
  }

  finishEvaluate(report: ReportDoc | null): void {
    this.evaluating = false;
    if (report) {
      this.report = report;
      this.reportStale = false;
    }
    this.emit();
  }
}
