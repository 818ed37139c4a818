import type {
  ApiErrorBody,
  DatasetDescriptor,
  DatasetDoc,
  FeatureEntry,
  ModeDoc,
  ModelDoc,
  PreviewResponse,
  ReportDoc,
  RuleDoc,
  TreeDoc,
  TreeRecordDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export interface TrainRequest {
  dataset_id: string;
  kind: "stump" | "logreg";
  feature_subset: string[];
  learning_rate?: number;
  epochs?: number;
  l2?: number;
  seed?: number;
}

/** Thin typed client over the JSON endpoints; one instance per session. */
export class ApiClient {
  constructor(
    readonly baseUrl: string = "",
    public token: string | null = null,
  ) {}

  private headers(json = true): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h["Content-Type"] = "application/json";
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    const text = await res.text();
    const body = text ? JSON.parse(text) : null;
    if (!res.ok) {
      const err: ApiErrorBody = body?.error ?? {
        code: "HttpError",
        message: `${res.status} ${res.statusText}`,
      };
      throw new ApiError(res.status, err);
    }
    return body as T;
  }

  listDatasets(): Promise<DatasetDescriptor[]> {
    return this.request("/api/datasets");
  }

  getDataset(id: string): Promise<DatasetDoc> {
    return this.request(`/api/datasets/${encodeURIComponent(id)}`);
  }

  importDataset(form: FormData): Promise<DatasetDescriptor> {
    return this.request("/api/datasets", {
      method: "POST",
      headers: this.headers(false),
      body: form,
    });
  }

  searchFeatures(datasetId: string, query: string): Promise<FeatureEntry[]> {
    const q = encodeURIComponent(query);
    return this.request(`/api/datasets/${encodeURIComponent(datasetId)}/features?query=${q}`);
  }

  previewRule(datasetId: string, rule: RuleDoc): Promise<PreviewResponse> {
    return this.request(`/api/datasets/${encodeURIComponent(datasetId)}/preview`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ rule }),
    });
  }

  listTrees(signature?: string): Promise<TreeRecordDoc[]> {
    const suffix = signature ? `?signature=${encodeURIComponent(signature)}` : "";
    return this.request(`/api/trees${suffix}`, { headers: this.headers(false) });
  }

  getTree(id: string): Promise<TreeRecordDoc> {
    return this.request(`/api/trees/${encodeURIComponent(id)}`, {
      headers: this.headers(false),
    });
  }

  saveTree(tree: TreeDoc, visibility: "public" | "private"): Promise<TreeRecordDoc> {
    return this.request("/api/trees", {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ tree, visibility }),
    });
  }

  updateTree(id: string, tree: TreeDoc, visibility: "public" | "private"): Promise<TreeRecordDoc> {
    return this.request(`/api/trees/${encodeURIComponent(id)}`, {
      method: "PUT",
      headers: this.headers(),
      body: JSON.stringify({ tree, visibility }),
    });
  }

  evaluate(treeId: string, mode: ModeDoc, datasetId?: string): Promise<ReportDoc> {
    const suffix = datasetId ? `?dataset_id=${encodeURIComponent(datasetId)}` : "";
    return this.request(`/api/trees/${encodeURIComponent(treeId)}/evaluate${suffix}`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify(mode),
    });
  }

  trainModel(req: TrainRequest): Promise<{ model: ModelDoc; warnings: string[] }> {
    return this.request("/api/models/train", {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify(req),
    });
  }

  evaluateEnsemble(treeIds: string[], datasetId: string, mode: ModeDoc): Promise<ReportDoc> {
    return this.request("/api/ensemble/evaluate", {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ tree_ids: treeIds, dataset_id: datasetId, mode }),
    });
  }
}
