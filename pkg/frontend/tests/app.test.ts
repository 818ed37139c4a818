import { describe, expect, it } from "vitest";
import { inject } from "vitest";
import { App } from "../src/app.js";
import { container, TOKEN } from "./helpers.js";

describe("app wiring", () => {
  it("boots against the live backend and completes an evaluate round trip", async () => {
    const host = container();
    window.sessionStorage.setItem("branch.token", TOKEN);
    const app = new App(host, inject("baseUrl"));
    await app.boot();

    const options = [...host.querySelectorAll<HTMLOptionElement>(".dataset-picker option")];
    expect(options.length).toBeGreaterThanOrEqual(1);
    expect(options[0]?.textContent).toContain("demo");

    // a fresh working tree renders as a single leaf on the canvas
    expect(host.querySelectorAll(".canvas .tree-node")).toHaveLength(1);
    expect(host.querySelector(".sidebar-placeholder")).toBeTruthy();

    await app.evaluate();
    expect(app.session.report).not.toBeNull();
    expect(host.querySelector(".metric-accuracy")?.textContent).toBe("0.700");
    expect(host.querySelector(".metric-auc")?.textContent).toBe("0.500");
    expect(host.querySelector(".warning-banner")?.textContent).toBe(
      "training-set evaluation may overfit",
    );

    // editing the tree clears the report and prompts to re-evaluate
    app.session.editTree((t) => ({ ...t, name: "edited" }));
    expect(host.querySelector(".metric-accuracy")).toBeNull();
    expect(host.querySelector(".stale-prompt")).toBeTruthy();
  });

  it("shows a banner for invalid pasted tree JSON", async () => {
    const host = container();
    const app = new App(host, inject("baseUrl"));
    await app.boot();
    app.importTreeJson("{not json");
    expect(host.querySelector(".error-banner")?.textContent).toContain("invalid tree JSON");
  });
});
