import { summarizeRule } from "./rule_label.js";
import { isLeaf, type NodeDoc, type TreeDoc } from "./types.js";

export interface RenderHandlers {
  onNodeClick?: (path: string, node: NodeDoc) => void;
}

const NODE_W = 148;
const NODE_H = 42;
const H_GAP = 16;
const V_GAP = 56;

interface Laid {
  node: NodeDoc;
  path: string;
  x: number; // leaf-slot units, centered
  depth: number;
}

function layout(node: NodeDoc, path: string, depth: number, nextSlot: { v: number }, out: Laid[]): number {
  if (isLeaf(node)) {
    const x = nextSlot.v++;
    out.push({ node, path, x, depth });
    return x;
  }
  const lx = layout(node.split.left, path + "L", depth + 1, nextSlot, out);
  const rx = layout(node.split.right, path + "R", depth + 1, nextSlot, out);
  const x = (lx + rx) / 2;
  out.push({ node, path, x, depth });
  return x;
}

/**
 * Node-link diagram: one SVG group per tree node, split nodes labeled with a
 * rule summary, leaves with their predicted class. The left branch is the
 * rule's "low" side. Malformed documents render as an error banner instead
 * of a blank canvas.
 */
export function renderTree(container: HTMLElement, tree: TreeDoc, handlers: RenderHandlers = {}): void {
  container.textContent = "";
  let laid: Laid[];
  try {
    laid = [];
    layout(tree.root, "", 0, { v: 0 }, laid);
  } catch (err) {
    renderBanner(container, `could not render tree: ${String(err)}`);
    return;
  }

  const maxDepth = Math.max(...laid.map((l) => l.depth));
  const slots = Math.max(...laid.map((l) => l.x)) + 1;
  const width = slots * (NODE_W + H_GAP) + H_GAP;
  const height = (maxDepth + 1) * (NODE_H + V_GAP) + V_GAP;

  const svgNS = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNS, "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("class", "tree-canvas");

  const cx = (l: Laid) => H_GAP + l.x * (NODE_W + H_GAP) + NODE_W / 2;
  const cy = (l: Laid) => V_GAP / 2 + l.depth * (NODE_H + V_GAP) + NODE_H / 2;
  const byPath = new Map(laid.map((l) => [l.path, l]));

  for (const l of laid) {
    if (isLeaf(l.node)) continue;
    for (const [childPath, side] of [[l.path + "L", "low"], [l.path + "R", "high"]] as const) {
      const child = byPath.get(childPath);
      if (!child) continue;
      const line = document.createElementNS(svgNS, "line");
      line.setAttribute("x1", String(cx(l)));
      line.setAttribute("y1", String(cy(l) + NODE_H / 2));
      line.setAttribute("x2", String(cx(child)));
      line.setAttribute("y2", String(cy(child) - NODE_H / 2));
      line.setAttribute("class", "tree-edge");
      svg.appendChild(line);
      const lbl = document.createElementNS(svgNS, "text");
      lbl.setAttribute("x", String((cx(l) + cx(child)) / 2));
      lbl.setAttribute("y", String((cy(l) + cy(child)) / 2));
      lbl.setAttribute("class", "edge-label");
      lbl.textContent = side;
      svg.appendChild(lbl);
    }
  }

  for (const l of laid) {
    const g = document.createElementNS(svgNS, "g");
    g.setAttribute("class", isLeaf(l.node) ? "tree-node leaf" : "tree-node split");
    g.setAttribute("data-path", l.path);
    const rect = document.createElementNS(svgNS, "rect");
    rect.setAttribute("x", String(cx(l) - NODE_W / 2));
    rect.setAttribute("y", String(cy(l) - NODE_H / 2));
    rect.setAttribute("width", String(NODE_W));
    rect.setAttribute("height", String(NODE_H));
    rect.setAttribute("rx", "6");
    g.appendChild(rect);
    const text = document.createElementNS(svgNS, "text");
    text.setAttribute("x", String(cx(l)));
    text.setAttribute("y", String(cy(l) + 4));
    text.setAttribute("text-anchor", "middle");
    text.textContent = isLeaf(l.node)
      ? l.node.leaf.label
      : summarizeRule(l.node.split.rule);
    g.appendChild(text);
    if (handlers.onNodeClick) {
      const { path, node } = l;
      g.addEventListener("click", () => handlers.onNodeClick?.(path, node));
    }
    svg.appendChild(g);
  }

  container.appendChild(svg);
}

export function renderBanner(container: HTMLElement, message: string): void {
  container.textContent = "";
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  container.appendChild(banner);
}
