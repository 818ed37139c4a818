import type { ApiClient } from "./api.js";
import type { UiSession } from "./session.js";
import type {
  FeatureEntry,
  ModelRuleDoc,
  RuleDoc,
  TreeRecordDoc,
  VisualRuleDoc,
} from "./types.js";

// Exactly the five split-rule kinds, one tab each; no UI-only node types.
export const RULE_TABS = ["feature", "custom", "model", "tree", "visual"] as const;
export type RuleTab = (typeof RULE_TABS)[number];

export const TAB_TO_RULE_KIND: Record<RuleTab, RuleDoc["kind"]> = {
  feature: "feature",
  custom: "custom",
  model: "model",
  tree: "treeref",
  visual: "visual",
};

export interface SearchPanelOptions {
  onRule: (rule: RuleDoc) => void;
  signature?: string;
}

/**
 * The node-insertion surface: a live search bar over the dataset's features
 * plus one tab per rule kind. Rule construction went through these methods
 * regardless of which control triggered them.
 */
export class SearchPanel {
  activeTab: RuleTab = "feature";
  readonly root: HTMLElement;
  private results: HTMLElement;
  private input: HTMLInputElement;

  constructor(
    container: HTMLElement,
    private api: ApiClient,
    private session: UiSession,
    private opts: SearchPanelOptions,
  ) {
    this.root = document.createElement("div");
    this.root.className = "search-panel";

    const tabs = document.createElement("div");
    tabs.className = "rule-tabs";
    for (const tab of RULE_TABS) {
      const btn = document.createElement("button");
      btn.textContent = tab;
      btn.dataset.tab = tab;
      btn.addEventListener("click", () => this.selectTab(tab));
      tabs.appendChild(btn);
    }
    this.root.appendChild(tabs);

    this.input = document.createElement("input");
    this.input.type = "search";
    this.input.placeholder = "search features to add a split node";
    this.input.className = "node-search";
    this.input.addEventListener("input", () => {
      void this.query(this.input.value);
    });
    this.root.appendChild(this.input);

    this.results = document.createElement("div");
    this.results.className = "search-results";
    this.root.appendChild(this.results);

    container.appendChild(this.root);
  }

  selectTab(tab: RuleTab): void {
    this.activeTab = tab;
    for (const btn of this.root.querySelectorAll<HTMLButtonElement>(".rule-tabs button")) {
      btn.classList.toggle("active", btn.dataset.tab === tab);
    }
    this.results.textContent = "";
    if (tab === "tree") void this.showLibraryTrees();
  }

  /** Live feature query backing the search bar (and the feature tab). */
  async query(text: string): Promise<FeatureEntry[]> {
    if (!this.session.datasetId) return [];
    const entries = await this.api.searchFeatures(this.session.datasetId, text);
    this.results.textContent = "";
    if (!entries.length) {
      const none = document.createElement("div");
      none.className = "no-results";
      none.textContent = "no matching features";
      this.results.appendChild(none);
      return entries;
    }
    const list = document.createElement("ul");
    list.className = "feature-dropdown";
    for (const entry of entries) {
      const li = document.createElement("li");
      li.dataset.feature = entry.name;
      li.textContent = `${entry.name} (${entry.kind})`;
      li.addEventListener("click", () => this.pickFeature(entry));
      list.appendChild(li);
    }
    this.results.appendChild(list);
    return entries;
  }

  /** Numeric features prompt for a threshold, defaulting to the median. */
  pickFeature(entry: FeatureEntry): void {
    this.results.textContent = "";
    if (entry.kind === "numeric") {
      const form = document.createElement("form");
      form.className = "threshold-form";
      const field = document.createElement("input");
      field.type = "number";
      field.step = "any";
      field.name = "threshold";
      if (entry.median !== null && entry.median !== undefined) {
        field.value = String(entry.median);
      }
      const ok = document.createElement("button");
      ok.type = "submit";
      ok.textContent = `split on ${entry.name}`;
      form.append(field, ok);
      form.addEventListener("submit", (ev) => {
        ev.preventDefault();
        this.emitFeatureRule(entry, Number(field.value));
      });
      this.results.appendChild(form);
    } else {
      const form = document.createElement("form");
      form.className = "category-form";
      for (const cat of entry.categories) {
        const label = document.createElement("label");
        const box = document.createElement("input");
        box.type = "checkbox";
        box.value = cat;
        label.append(box, document.createTextNode(cat));
        form.appendChild(label);
      }
      const ok = document.createElement("button");
      ok.type = "submit";
      ok.textContent = `split on ${entry.name}`;
      form.appendChild(ok);
      form.addEventListener("submit", (ev) => {
        ev.preventDefault();
        const picked = [...form.querySelectorAll<HTMLInputElement>("input:checked")].map(
          (b) => b.value,
        );
        this.emitFeatureRule(entry, picked);
      });
      this.results.appendChild(form);
    }
  }

  emitFeatureRule(entry: FeatureEntry, choice: number | string[]): RuleDoc {
    const rule: RuleDoc =
      typeof choice === "number"
        ? { kind: "feature", feature: entry.name, threshold: choice }
        : { kind: "feature", feature: entry.name, left_categories: choice };
    this.opts.onRule(rule);
    return rule;
  }

  emitCustomRule(weights: Record<string, number>, offset: number, threshold: number): RuleDoc {
    const rule: RuleDoc = { kind: "custom", weights, offset, threshold };
    this.opts.onRule(rule);
    return rule;
  }

  /** Train on the server, then wrap the returned model in a rule. */
  async emitModelRule(
    kind: "stump" | "logreg",
    featureSubset: string[],
    hyper: { learning_rate?: number; epochs?: number; l2?: number; seed?: number } = {},
  ): Promise<ModelRuleDoc> {
    if (!this.session.datasetId) throw new Error("no dataset selected");
    const res = await this.api.trainModel({
      dataset_id: this.session.datasetId,
      kind,
      feature_subset: featureSubset,
      ...hyper,
    });
    const rule: ModelRuleDoc = { kind: "model", model: res.model, feature_subset: featureSubset };
    this.opts.onRule(rule);
    return rule;
  }

  async showLibraryTrees(): Promise<TreeRecordDoc[]> {
    const records = await this.api.listTrees(this.opts.signature);
    this.results.textContent = "";
    const list = document.createElement("ul");
    list.className = "tree-dropdown";
    for (const rec of records) {
      const li = document.createElement("li");
      li.dataset.treeId = rec.tree.id;
      li.textContent = `${rec.tree.name} (${rec.visibility}${rec.mine ? ", mine" : ""})`;
      li.addEventListener("click", () => this.emitTreeRefRule(rec.tree.id));
      list.appendChild(li);
    }
    this.results.appendChild(list);
    return records;
  }

  emitTreeRefRule(treeId: string): RuleDoc {
    const rule: RuleDoc = { kind: "treeref", tree_id: treeId };
    this.opts.onRule(rule);
    return rule;
  }

  emitVisualRule(rule: VisualRuleDoc): RuleDoc {
    this.opts.onRule(rule);
    return rule;
  }
}
