import { describe, expect, it } from "vitest";
import { formatMetric, renderSidebar } from "../src/sidebar.js";
import type { ReportDoc } from "../src/types.js";
import { client, container, demoDataset, majorityLeafTree } from "./helpers.js";

describe("evaluation sidebar", () => {
  it("renders the intercepted report payload verbatim (demo fixture)", async () => {
    const api = client();
    const demo = await demoDataset(api);
    const saved = await api.saveTree(majorityLeafTree(demo.signature, "sidebar"), "public");

    // intercept the payload exactly as it left the wire
    const payload: ReportDoc = await api.evaluate(saved.tree.id, { trainingSet: {} }, demo.id);

    const host = container();
    renderSidebar(host, payload, { classNames: demo.class });

    const accuracy = host.querySelector(".metric-accuracy")?.textContent;
    const auc = host.querySelector(".metric-auc")?.textContent;
    // displayed strings are string-formatted views of the payload fields
    expect(accuracy).toBe("0.700");
    expect(auc).toBe("0.500");
    expect(accuracy).toBe(formatMetric(payload.accuracy));
    expect(auc).toBe(formatMetric(payload.auc));

    const cells = [...host.querySelectorAll(".confusion tr")].map((tr) =>
      [...tr.querySelectorAll("td")].map((td) => td.textContent),
    );
    expect(cells[0]).toEqual(["", "pred recurrence", "pred good"]);
    expect(cells[1]).toEqual(["true recurrence", String(payload.confusion.tp), String(payload.confusion.fn)]);
    expect(cells[2]).toEqual(["true good", String(payload.confusion.fp), String(payload.confusion.tn)]);
    expect(cells[1]).toEqual(["true recurrence", "7", "0"]);
    expect(cells[2]).toEqual(["true good", "3", "0"]);

    const warning = host.querySelector(".warning-banner")?.textContent;
    expect(payload.warnings).toContain(warning);
    expect(warning).toBe("training-set evaluation may overfit");

    expect(host.querySelector(".sidebar-mode")?.textContent).toBe("training set");
  });

  it("shows the mode with fraction and seed for percentage splits", async () => {
    const api = client();
    const demo = await demoDataset(api);
    const saved = await api.saveTree(majorityLeafTree(demo.signature, "sidebar2"), "public");
    const payload = await api.evaluate(
      saved.tree.id,
      { percentageSplit: { fraction: 0.66, seed: 7 } },
      demo.id,
    );
    const host = container();
    renderSidebar(host, payload, { classNames: demo.class });
    expect(host.querySelector(".sidebar-mode")?.textContent).toBe(
      "percentage split (fraction 0.66, seed 7)",
    );
  });

  it("prompts to re-evaluate when the report is stale", () => {
    const host = container();
    renderSidebar(host, null, { stale: true });
    expect(host.querySelector(".stale-prompt")).toBeTruthy();
    expect(host.querySelector(".sidebar-placeholder")).toBeNull();
  });

  it("renders a placeholder before the first evaluation", () => {
    const host = container();
    renderSidebar(host, null, {});
    expect(host.querySelector(".sidebar-placeholder")?.textContent).toBe("no evaluation yet");
  });
});
