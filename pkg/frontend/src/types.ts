// Wire types mirroring the server's JSON documents. The UI renders these
// verbatim; it never derives metrics of its own.

export type RuleKind = "feature" | "custom" | "model" | "treeref" | "visual";

export interface FeatureRuleDoc {
  kind: "feature";
  feature: string;
  threshold?: number;
  left_categories?: string[];
}

export interface CustomRuleDoc {
  kind: "custom";
  weights: Record<string, number>;
  offset: number;
  threshold: number;
}

export interface StumpModelDoc {
  kind: "stump";
  feature: string;
  threshold: number;
  left_label: "positive" | "negative";
  p_left: number;
  p_right: number;
}

export interface LogRegModelDoc {
  kind: "logreg";
  features: string[];
  weights: number[];
  bias: number;
  means: number[];
  stds: number[];
}

export type ModelDoc = StumpModelDoc | LogRegModelDoc;

export interface ModelRuleDoc {
  kind: "model";
  model: ModelDoc;
  feature_subset: string[];
}

export interface TreeRefRuleDoc {
  kind: "treeref";
  tree_id: string;
}

export interface VisualRuleDoc {
  kind: "visual";
  feature_x: string;
  feature_y: string;
  polygons: number[][][];
}

export type RuleDoc =
  | FeatureRuleDoc
  | CustomRuleDoc
  | ModelRuleDoc
  | TreeRefRuleDoc
  | VisualRuleDoc;

export interface LeafDoc {
  leaf: { label: "positive" | "negative"; total: number; positive: number };
}

export interface SplitDoc {
  split: { rule: RuleDoc; left: NodeDoc; right: NodeDoc };
}

export type NodeDoc = LeafDoc | SplitDoc;

export function isLeaf(node: NodeDoc): node is LeafDoc {
  return "leaf" in node;
}

export interface TreeDoc {
  id: string;
  name: string;
  dataset_signature: string;
  root: NodeDoc;
}

export interface TreeRecordDoc {
  tree: TreeDoc;
  visibility: "public" | "private";
  created_at: string;
  updated_at: string;
  mine: boolean;
}

export type ModeDoc =
  | { trainingSet: Record<string, never> }
  | { testSet: { datasetId: string } }
  | { percentageSplit: { fraction: number; seed: number } };

export interface LeafStatDoc {
  path: string;
  count: number;
  fraction: number;
  accuracy?: number;
  label: "positive" | "negative";
}

export interface ReportDoc {
  mode: ModeDoc;
  accuracy: number;
  auc: number;
  confusion: { tp: number; fp: number; fn: number; tn: number };
  leaves: LeafStatDoc[];
  warnings: string[];
}

export interface DatasetDescriptor {
  id: string;
  name: string;
  signature: string;
  feature_count: number;
  sample_count: number;
  class: { positive: string; negative: string };
  description: string;
  companion_test_dataset_id: string | null;
  created_at: string;
}

export interface DatasetDoc {
  id: string;
  name: string;
  features: { name: string; kind: "numeric" | "categorical"; categories: string[] }[];
  class: { positive: string; negative: string };
  rows: (number | string | null)[][];
}

export interface FeatureEntry {
  name: string;
  kind: "numeric" | "categorical";
  categories: string[];
  median?: number | null;
}

export interface PreviewResponse {
  left: number;
  right: number;
  missing: number;
  sides: ("L" | "R" | "M")[];
  labels: string[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  location?: string;
  issues?: ApiErrorBody[];
}
