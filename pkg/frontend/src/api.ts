/** Typed client for the query service. */

export interface QueryRequestBody {
  phrase: string;
  limit?: number;
  depth?: number | null;
  include_inputs?: boolean;
}

export interface InputWord {
  word: string;
  nu: number;
}

export interface ResultEntry {
  word: string;
  score: number;
  /** First-activation depth per input word; null when unreached. */
  distances: Record<string, number | null>;
}

export interface QueryResponse {
  inputs: InputWord[];
  unknown_tokens: string[];
  results: ResultEntry[];
  depth_used: number;
  matrix: string;
  timing_ms: number;
}

export interface MetaResponse {
  n: number;
  matrices: string[];
  default_matrix: string;
  sparsity: number;
  max_nonredundant_depth: Record<string, number>;
  format_version: number;
  manifest: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async query(body: QueryRequestBody): Promise<QueryResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      let code = "HTTP_ERROR";
      let detail = resp.statusText;
      try {
        const payload = await resp.json();
        if (payload && typeof payload.code === "string") code = payload.code;
        if (payload && payload.detail) detail = String(payload.detail);
      } catch {
        // non-JSON error body; keep defaults
      }
      throw new ApiError(resp.status, code, detail);
    }
    return (await resp.json()) as QueryResponse;
  }

  async meta(): Promise<MetaResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/meta`);
    if (!resp.ok) {
      throw new ApiError(resp.status, "HTTP_ERROR", resp.statusText);
    }
    return (await resp.json()) as MetaResponse;
  }

  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchFn(`${this.baseUrl}/api/health`);
      return resp.ok;
    } catch {
      return false;
    }
  }
}
