import { ApiClient, ApiError } from "./api.js";
import { leafSummary, renderLeafDialog } from "./leaf_dialog.js";
import { summarizeRule } from "./rule_label.js";
import { SearchPanel } from "./search.js";
import { UiSession } from "./session.js";
import { renderSidebar } from "./sidebar.js";
import { emptyTree, nodeAt, rulePathTo, splitLeaf } from "./tree_edit.js";
import { renderBanner, renderTree } from "./tree_render.js";
import { isLeaf, type DatasetDescriptor, type ModeDoc, type TreeDoc } from "./types.js";
import { VisualEditor } from "./visual_editor.js";

export class App {
  readonly api: ApiClient;
  readonly session: UiSession;
  private datasets: DatasetDescriptor[] = [];
  private selectedPath: string | null = null;
  private search: SearchPanel | null = null;

  private el: {
    datasetPicker: HTMLSelectElement;
    canvas: HTMLElement;
    sidebar: HTMLElement;
    dialog: HTMLElement;
    searchHost: HTMLElement;
    visualHost: HTMLElement;
    library: HTMLElement;
    banner: HTMLElement;
    modeHost: HTMLElement;
    toolbar: HTMLElement;
  };

  constructor(root: HTMLElement, baseUrl = "") {
    this.session = new UiSession();
    this.api = new ApiClient(baseUrl, this.session.token);
    root.innerHTML = `
      <header>
        <select class="dataset-picker"></select>
        <span class="toolbar"></span>
        <input class="token-box" type="password" placeholder="bearer token (for saving)" />
      </header>
      <div class="banner-host"></div>
      <main>
        <section class="left">
          <div class="search-host"></div>
          <div class="library"></div>
        </section>
        <section class="center">
          <div class="mode-host"></div>
          <div class="canvas"></div>
          <div class="dialog"></div>
          <div class="visual-host"></div>
        </section>
        <aside class="sidebar"></aside>
      </main>`;
    this.el = {
      datasetPicker: root.querySelector(".dataset-picker")!,
      canvas: root.querySelector(".canvas")!,
      sidebar: root.querySelector(".sidebar")!,
      dialog: root.querySelector(".dialog")!,
      searchHost: root.querySelector(".search-host")!,
      visualHost: root.querySelector(".visual-host")!,
      library: root.querySelector(".library")!,
      banner: root.querySelector(".banner-host")!,
      modeHost: root.querySelector(".mode-host")!,
      toolbar: root.querySelector(".toolbar")!,
    };

    const tokenBox = root.querySelector<HTMLInputElement>(".token-box")!;
    tokenBox.value = this.session.token ?? "";
    tokenBox.addEventListener("change", () => {
      this.session.token = tokenBox.value || null;
      this.api.token = this.session.token;
    });

    this.el.datasetPicker.addEventListener("change", () => {
      void this.selectDataset(this.el.datasetPicker.value);
    });

    this.buildToolbar();
    this.buildModePicker();
    this.session.onChange(() => this.redraw());
  }

  async boot(): Promise<void> {
    this.datasets = await this.api.listDatasets();
    this.el.datasetPicker.textContent = "";
    for (const d of this.datasets) {
      const opt = document.createElement("option");
      opt.value = d.id;
      opt.textContent = `${d.name} (${d.sample_count} rows)`;
      this.el.datasetPicker.appendChild(opt);
    }
    const first = this.datasets[0];
    if (first) await this.selectDataset(first.id);
  }

  descriptor(): DatasetDescriptor | undefined {
    return this.datasets.find((d) => d.id === this.session.datasetId);
  }

  async selectDataset(id: string): Promise<void> {
    this.session.selectDataset(id);
    const desc = this.descriptor();
    const signature = desc?.signature ?? "";
    this.session.setTree(emptyTree(`${desc?.name ?? "new"} tree`, signature));
    this.search?.root.remove();
    this.el.searchHost.textContent = "";
    this.search = new SearchPanel(this.el.searchHost, this.api, this.session, {
      signature,
      onRule: (rule) => {
        if (this.selectedPath === null) return;
        try {
          this.session.editTree((t) => splitLeaf(t, this.selectedPath!, rule));
          this.selectedPath = null;
        } catch (err) {
          renderBanner(this.el.banner, String(err));
        }
      },
    });
    await this.refreshLibrary();
  }

  private buildToolbar(): void {
    const evalBtn = document.createElement("button");
    evalBtn.className = "evaluate-btn";
    evalBtn.textContent = "evaluate";
    evalBtn.addEventListener("click", () => void this.evaluate());
    const savePub = document.createElement("button");
    savePub.textContent = "save (public)";
    savePub.addEventListener("click", () => void this.save("public"));
    const savePriv = document.createElement("button");
    savePriv.textContent = "save (private)";
    savePriv.addEventListener("click", () => void this.save("private"));
    this.el.toolbar.append(evalBtn, savePub, savePriv);
  }

  private buildModePicker(): void {
    const host = this.el.modeHost;
    host.innerHTML = `
      <label><input type="radio" name="mode" value="train" checked /> training set</label>
      <label><input type="radio" name="mode" value="split" /> percentage split</label>
      <input class="split-fraction" type="number" step="0.01" min="0.01" max="0.99" value="0.66" />
      <input class="split-seed" type="number" step="1" value="7" />`;
    host.addEventListener("change", () => {
      const mode = host.querySelector<HTMLInputElement>("input[name=mode]:checked")!.value;
      this.session.setMode(this.currentMode(mode));
    });
  }

  private currentMode(kind: string): ModeDoc {
    if (kind === "split") {
      const fraction = Number(
        this.el.modeHost.querySelector<HTMLInputElement>(".split-fraction")!.value,
      );
      const seed = Number(this.el.modeHost.querySelector<HTMLInputElement>(".split-seed")!.value);
      return { percentageSplit: { fraction, seed } };
    }
    return { trainingSet: {} };
  }

  async evaluate(): Promise<void> {
    const tree = this.session.workingTree;
    if (!tree || !this.session.datasetId) return;
    if (!this.session.beginEvaluate()) return; // one in-flight call at a time
    try {
      const saved = await this.ensureSaved(tree);
      const report = await this.api.evaluate(saved.id, this.session.mode, this.session.datasetId);
      this.session.finishEvaluate(report);
    } catch (err) {
      this.session.finishEvaluate(null);
      this.showError(err);
    }
  }

  /** Evaluation addresses stored trees; autosave privately when unsaved. */
  private async ensureSaved(tree: TreeDoc): Promise<TreeDoc> {
    if (tree.id) {
      const rec = await this.api.updateTree(tree.id, tree, "private");
      this.session.workingTree = rec.tree;
      return rec.tree;
    }
    const rec = await this.api.saveTree(tree, "private");
    this.session.workingTree = rec.tree;
    return rec.tree;
  }

  async save(visibility: "public" | "private"): Promise<void> {
    const tree = this.session.workingTree;
    if (!tree) return;
    try {
      const rec = tree.id
        ? await this.api.updateTree(tree.id, tree, visibility)
        : await this.api.saveTree(tree, visibility);
      this.session.workingTree = rec.tree;
      await this.refreshLibrary();
    } catch (err) {
      this.showError(err);
    }
  }

  async refreshLibrary(): Promise<void> {
    const tree = this.session.workingTree;
    const records = await this.api.listTrees(tree?.dataset_signature || undefined);
    this.el.library.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = "tree library";
    this.el.library.appendChild(heading);
    const list = document.createElement("ul");
    for (const rec of records) {
      const li = document.createElement("li");
      li.dataset.treeId = rec.tree.id;
      li.textContent = `${rec.tree.name} (${rec.visibility})`;
      li.addEventListener("click", () => {
        this.session.setTree(rec.tree);
      });
      list.appendChild(li);
    }
    this.el.library.appendChild(list);
  }

  importTreeJson(text: string): void {
    try {
      const doc = JSON.parse(text) as TreeDoc;
      this.session.setTree(doc);
      this.el.banner.textContent = "";
    } catch (err) {
      renderBanner(this.el.banner, `invalid tree JSON: ${String(err)}`);
    }
  }

  private showError(err: unknown): void {
    if (err instanceof ApiError) {
      const where = err.body.location ? ` at ${err.body.location}` : "";
      renderBanner(this.el.banner, `${err.body.code}${where}: ${err.body.message}`);
    } else {
      renderBanner(this.el.banner, String(err));
    }
  }

  openVisualEditor(featureX: string, featureY: string): VisualEditor {
    this.el.visualHost.textContent = "";
    const editor = new VisualEditor(
      this.el.visualHost,
      this.api,
      this.session.datasetId!,
      featureX,
      featureY,
      (rule) => this.search?.emitVisualRule(rule),
    );
    void editor.load();
    return editor;
  }

  private redraw(): void {
    const tree = this.session.workingTree;
    if (tree) {
      renderTree(this.el.canvas, tree, {
        onNodeClick: (path, node) => {
          this.selectedPath = path;
          if (isLeaf(node)) this.openLeafDialog(path);
          else this.el.dialog.textContent = summarizeRule(node.split.rule);
        },
      });
    }
    const desc = this.descriptor();
    renderSidebar(this.el.sidebar, this.session.report, {
      stale: this.session.reportStale,
      classNames: desc?.class,
    });
    // editing closes any open leaf dialog (its stats would be stale)
    if (this.session.reportStale) this.el.dialog.textContent = "";
  }

  openLeafDialog(path: string): void {
    const tree = this.session.workingTree;
    const report = this.session.report;
    if (!tree) return;
    const stat = report?.leaves.find((l) => l.path === path);
    if (!stat) {
      this.el.dialog.textContent = "evaluate to see leaf statistics";
      return;
    }
    renderLeafDialog(this.el.dialog, stat, rulePathTo(tree, path, summarizeRule));
  }
}

export function boot(): void {
  const root = document.getElementById("app");
  if (root) {
    const app = new App(root);
    void app.boot();
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
