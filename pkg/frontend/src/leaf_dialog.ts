import type { LeafStatDoc } from "./types.js";

export const EMPTY_LEAF_MESSAGE = "no samples reached this leaf";

export function leafSummary(stat: LeafStatDoc): string {
  if (stat.count === 0 || stat.accuracy === undefined) return EMPTY_LEAF_MESSAGE;
  const fraction = (stat.fraction * 100).toFixed(1);
  const accuracy = (stat.accuracy * 100).toFixed(1);
  return `${fraction}% of samples, ${accuracy}% accurate`;
}

/** Popup body for a clicked leaf: summary line, predicted label, rule path. */
export function renderLeafDialog(
  container: HTMLElement,
  stat: LeafStatDoc,
  rulePath: string[],
): void {
  container.textContent = "";
  const summary = document.createElement("p");
  summary.className = "leaf-summary";
  summary.textContent = leafSummary(stat);
  container.appendChild(summary);

  const label = document.createElement("p");
  label.className = "leaf-label";
  label.textContent = `predicts: ${stat.label}`;
  container.appendChild(label);

  if (rulePath.length) {
    const list = document.createElement("ol");
    list.className = "leaf-rule-path";
    for (const step of rulePath) {
      const li = document.createElement("li");
      li.textContent = step;
      list.appendChild(li);
    }
    container.appendChild(list);
  }
}
