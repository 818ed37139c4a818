import { inject } from "vitest";
import { ApiClient } from "../src/api.js";
import { UiSession } from "../src/session.js";
import type { DatasetDescriptor, NodeDoc, TreeDoc } from "../src/types.js";

export const TOKEN = "ui-test-0123456789abcdef";

export function client(token: string | null = TOKEN): ApiClient {
  return new ApiClient(inject("baseUrl"), token);
}

export async function demoDataset(api: ApiClient): Promise<DatasetDescriptor> {
  const all = await api.listDatasets();
  const demo = all.find((d) => d.name === "demo");
  if (!demo) throw new Error("demo dataset missing from the seeded store");
  return demo;
}

export function majorityLeafTree(signature: string, name = "majority"): TreeDoc {
  return {
    id: "",
    name,
    dataset_signature: signature,
    root: { leaf: { label: "positive", total: 0, positive: 0 } },
  };
}

export function treeOf(signature: string, root: NodeDoc, name = "t"): TreeDoc {
  return { id: "", name, dataset_signature: signature, root };
}

export function freshSession(datasetId: string): UiSession {
  const session = new UiSession(window.sessionStorage);
  session.selectDataset(datasetId);
  return session;
}

export function container(): HTMLElement {
  const div = document.createElement("div");
  document.body.appendChild(div);
  return div;
}
