import type { ApiClient } from "./api.js";
import type { DatasetDoc, PreviewResponse, VisualRuleDoc } from "./types.js";

const SIZE = 420;
const PAD = 30;

interface ScatterPoint {
  x: number;
  y: number;
  label: string;
}

/**
 * Polygon-drawing editor over a two-feature scatter plot. Vertices accumulate
 * with addVertex; closePolygon seals the current ring (at least three
 * vertices, rejected inline otherwise). Preview counts come from the server's
 * preview endpoint; the client never routes samples itself.
 */
export class VisualEditor {
  vertices: [number, number][] = [];
  polygons: [number, number][][] = [];
  points: ScatterPoint[] = [];
  error: string | null = null;
  preview: PreviewResponse | null = null;

  readonly root: HTMLElement;
  private status: HTMLElement;
  private counts: HTMLElement;

  constructor(
    container: HTMLElement,
    private api: ApiClient,
    private datasetId: string,
    readonly featureX: string,
    readonly featureY: string,
    private onConfirm: (rule: VisualRuleDoc) => void,
  ) {
    this.root = document.createElement("div");
    this.root.className = "visual-editor";
    this.status = document.createElement("div");
    this.status.className = "visual-status";
    this.counts = document.createElement("div");
    this.counts.className = "preview-counts";
    this.root.append(this.status, this.counts);
    container.appendChild(this.root);
  }

  async load(): Promise<void> {
    const doc: DatasetDoc = await this.api.getDataset(this.datasetId);
    const ix = doc.features.findIndex((f) => f.name === this.featureX);
    const iy = doc.features.findIndex((f) => f.name === this.featureY);
    this.points = [];
    for (const row of doc.rows) {
      const x = row[ix];
      const y = row[iy];
      const label = row[row.length - 1];
      if (typeof x === "number" && typeof y === "number" && typeof label === "string") {
        this.points.push({ x, y, label });
      }
    }
    this.renderScatter(doc.class.positive);
  }

  private renderScatter(positiveName: string): void {
    const svgNS = "http://www.w3.org/2000/svg";
    const svg = document.createElementNS(svgNS, "svg");
    svg.setAttribute("width", String(SIZE));
    svg.setAttribute("height", String(SIZE));
    svg.setAttribute("class", "scatter");
    const xs = this.points.map((p) => p.x);
    const ys = this.points.map((p) => p.y);
    const x0 = Math.min(...xs);
    const x1 = Math.max(...xs);
    const y0 = Math.min(...ys);
    const y1 = Math.max(...ys);
    const sx = (x: number) => PAD + ((x - x0) / (x1 - x0 || 1)) * (SIZE - 2 * PAD);
    const sy = (y: number) => SIZE - PAD - ((y - y0) / (y1 - y0 || 1)) * (SIZE - 2 * PAD);
    for (const p of this.points) {
      const dot = document.createElementNS(svgNS, "circle");
      dot.setAttribute("cx", String(sx(p.x)));
      dot.setAttribute("cy", String(sy(p.y)));
      dot.setAttribute("r", "4");
      dot.setAttribute("class", p.label === positiveName ? "dot positive" : "dot negative");
      svg.appendChild(dot);
    }
    svg.addEventListener("click", (ev) => {
      const rect = svg.getBoundingClientRect();
      const px = ev.clientX - rect.left;
      const py = ev.clientY - rect.top;
      const x = x0 + ((px - PAD) / (SIZE - 2 * PAD)) * (x1 - x0 || 1);
      const y = y0 + ((SIZE - PAD - py) / (SIZE - 2 * PAD)) * (y1 - y0 || 1);
      this.addVertex(x, y);
    });
    this.root.prepend(svg);
  }

  addVertex(x: number, y: number): void {
    this.vertices.push([x, y]);
    this.error = null;
    this.status.textContent = `${this.vertices.length} vertices in the open polygon`;
  }

  closePolygon(): boolean {
    if (this.vertices.length < 3) {
      this.error = "a polygon needs at least 3 vertices";
      this.status.textContent = this.error;
      this.status.classList.add("inline-error");
      return false;
    }
    this.polygons.push(this.vertices);
    this.vertices = [];
    this.error = null;
    this.status.classList.remove("inline-error");
    this.status.textContent = `${this.polygons.length} polygon(s) closed`;
    return true;
  }

  rule(): VisualRuleDoc {
    return {
      kind: "visual",
      feature_x: this.featureX,
      feature_y: this.featureY,
      polygons: this.polygons.map((poly) => poly.map(([x, y]) => [x, y])),
    };
  }

  /** Left/right/missing counts for the drawn regions, straight off the server. */
  async refreshPreview(): Promise<PreviewResponse> {
    this.preview = await this.api.previewRule(this.datasetId, this.rule());
    this.counts.textContent =
      `left ${this.preview.left} / right ${this.preview.right}` +
      (this.preview.missing ? ` / missing ${this.preview.missing}` : "");
    return this.preview;
  }

  confirm(): VisualRuleDoc | null {
    if (!this.polygons.length) {
      this.error = "close at least one polygon first";
      this.status.textContent = this.error;
      this.status.classList.add("inline-error");
      return null;
    }
    const rule = this.rule();
    this.onConfirm(rule);
    return rule;
  }
}
