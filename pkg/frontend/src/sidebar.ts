import type { ModeDoc, ReportDoc } from "./types.js";

// The sidebar is a formatting layer over the report payload: every number on
// screen is a string rendering of a field the server sent, never a value the
// client computed.

export function formatMetric(value: number): string {
  return value.toFixed(3);
}

export function describeMode(mode: ModeDoc): string {
  if ("trainingSet" in mode) return "training set";
  if ("testSet" in mode) return `test set (${mode.testSet.datasetId})`;
  const ps = mode.percentageSplit;
  return `percentage split (fraction ${ps.fraction}, seed ${ps.seed})`;
}

export interface SidebarOptions {
  stale?: boolean;
  classNames?: { positive: string; negative: string };
}

export function renderSidebar(
  container: HTMLElement,
  report: ReportDoc | null,
  opts: SidebarOptions = {},
): void {
  container.textContent = "";
  if (opts.stale) {
    const prompt = document.createElement("div");
    prompt.className = "stale-prompt";
    prompt.textContent = "tree changed — re-evaluate to refresh the metrics";
    container.appendChild(prompt);
  }
  if (!report) {
    if (!opts.stale) {
      const empty = document.createElement("div");
      empty.className = "sidebar-placeholder";
      empty.textContent = "no evaluation yet";
      container.appendChild(empty);
    }
    return;
  }

  const pos = opts.classNames?.positive ?? "positive";
  const neg = opts.classNames?.negative ?? "negative";

  const mode = document.createElement("div");
  mode.className = "sidebar-mode";
  mode.textContent = describeMode(report.mode);
  container.appendChild(mode);

  const metrics = document.createElement("dl");
  metrics.className = "sidebar-metrics";
  for (const [label, value] of [
    ["accuracy", formatMetric(report.accuracy)],
    ["AUC", formatMetric(report.auc)],
  ] as const) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.className = `metric-${label.toLowerCase()}`;
    dd.textContent = value;
    metrics.append(dt, dd);
  }
  container.appendChild(metrics);

  const c = report.confusion;
  const table = document.createElement("table");
  table.className = "confusion";
  const head = table.insertRow();
  head.insertCell().textContent = "";
  head.insertCell().textContent = `pred ${pos}`;
  head.insertCell().textContent = `pred ${neg}`;
  const rows: [string, number, number][] = [
    [`true ${pos}`, c.tp, c.fn],
    [`true ${neg}`, c.fp, c.tn],
  ];
  for (const [label, a, b] of rows) {
    const tr = table.insertRow();
    tr.insertCell().textContent = label;
    tr.insertCell().textContent = String(a);
    tr.insertCell().textContent = String(b);
  }
  container.appendChild(table);

  for (const warning of report.warnings) {
    const div = document.createElement("div");
    div.className = "warning-banner";
    div.textContent = warning;
    container.appendChild(div);
  }
}
