import { isLeaf, type NodeDoc, type RuleDoc, type TreeDoc } from "./types.js";

// A node path is the Left/Right walk from the root ("" = root), matching the
// leaf paths in evaluation reports.

export function nodeAt(tree: TreeDoc, path: string): NodeDoc {
  let node = tree.root;
  for (const step of path) {
    if (isLeaf(node)) throw new Error(`path ${path} walks past a leaf`);
    node = step === "L" ? node.split.left : node.split.right;
  }
  return node;
}

function replaceIn(node: NodeDoc, path: string, next: NodeDoc): NodeDoc {
  if (path === "") return next;
  if (isLeaf(node)) throw new Error("path walks past a leaf");
  const step = path[0];
  const rest = path.slice(1);
  return step === "L"
    ? { split: { ...node.split, left: replaceIn(node.split.left, rest, next) } }
    : { split: { ...node.split, right: replaceIn(node.split.right, rest, next) } };
}

export function replaceNode(tree: TreeDoc, path: string, next: NodeDoc): TreeDoc {
  return { ...tree, root: replaceIn(tree.root, path, next) };
}

export function freshLeaf(label: "positive" | "negative" = "positive"): NodeDoc {
  return { leaf: { label, total: 0, positive: 0 } };
}

/** Turn the leaf at `path` into a split on `rule` with two fresh leaves. */
export function splitLeaf(tree: TreeDoc, path: string, rule: RuleDoc): TreeDoc {
  const target = nodeAt(tree, path);
  if (!isLeaf(target)) throw new Error(`node at ${path || "(root)"} is already a split`);
  return replaceNode(tree, path, {
    split: { rule, left: freshLeaf("positive"), right: freshLeaf("negative") },
  });
}

export function emptyTree(name: string, signature: string): TreeDoc {
  return { id: "", name, dataset_signature: signature, root: freshLeaf() };
}

export function countNodes(node: NodeDoc): number {
  if (isLeaf(node)) return 1;
  return 1 + countNodes(node.split.left) + countNodes(node.split.right);
}

/** Rule summaries along the walk from the root to `path`. */
export function rulePathTo(tree: TreeDoc, path: string, summarize: (rule: RuleDoc) => string): string[] {
  const steps: string[] = [];
  let node = tree.root;
  for (const step of path) {
    if (isLeaf(node)) break;
    const side = step === "L" ? "low" : "high";
    steps.push(`${summarize(node.split.rule)} [${side}]`);
    node = step === "L" ? node.split.left : node.split.right;
  }
  return steps;
}
