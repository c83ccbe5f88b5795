/** HTTP client for the synthesis service.
 *
 * Requests within one session are serialized through a promise chain so
 * rapid UI interactions cannot interleave edits and regenerations; the
 * server's response is always the authoritative state.
 */

import {
  ApiErrorSchema,
  Boundary,
  BoundarySchema,
  Candidate,
  Constraints,
  EditCommand,
  EditResponseSchema,
  GenerateResponse,
  GenerateResponseSchema,
  LayoutGraph,
  RetrieveResponseSchema,
  SessionCreatedSchema,
  TransferResponseSchema,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private queue: Promise<unknown> = Promise.resolve();

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  /** Serialize calls: each request starts after the previous settles. */
  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const next = this.queue.then(task, task);
    this.queue = next.catch(() => undefined);
    return next;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<unknown> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (resp.status === 204) return null;
    const text = await resp.text();
    let parsed: unknown;
    try {
      parsed = JSON.parse(text);
    } catch {
      if (!resp.ok) throw new ApiError(resp.status, "unknown", text);
      return text;
    }
    if (!resp.ok) {
      const err = ApiErrorSchema.safeParse(parsed);
      if (err.success) {
        throw new ApiError(resp.status, err.data.error.code, err.data.error.message);
      }
      throw new ApiError(resp.status, "unknown", text);
    }
    return parsed;
  }

  async health(): Promise<{ status: string; corpus_size: number }> {
    const body = await this.request("GET", "/health");
    return body as { status: string; corpus_size: number };
  }

  async createSession(boundary: Boundary): Promise<string> {
    BoundarySchema.parse(boundary); // never send an invalid payload
    const body = await this.enqueue(() =>
      this.request("POST", "/sessions", { boundary }),
    );
    return SessionCreatedSchema.parse(body).session_id;
  }

  async retrieve(
    sessionId: string,
    constraints: Constraints,
    k: number,
  ): Promise<Candidate[]> {
    if (!Number.isInteger(k) || k < 1 || k > 100) {
      throw new ApiError(0, "invalid_k", "k must be an integer in [1, 100]");
    }
    const body = await this.enqueue(() =>
      this.request("POST", `/sessions/${sessionId}/retrieve`, { constraints, k }),
    );
    return RetrieveResponseSchema.parse(body).candidates;
  }

  async transfer(sessionId: string, recordId: string): Promise<LayoutGraph> {
    const body = await this.enqueue(() =>
      this.request("POST", `/sessions/${sessionId}/transfer`, {
        record_id: recordId,
      }),
    );
    return TransferResponseSchema.parse(body).graph;
  }

  async edit(sessionId: string, command: EditCommand): Promise<LayoutGraph> {
    const body = await this.enqueue(() =>
      this.request("POST", `/sessions/${sessionId}/edit`, command),
    );
    return EditResponseSchema.parse(body).graph;
  }

  async generate(
    sessionId: string,
    maxIters?: number,
  ): Promise<GenerateResponse> {
    const payload = maxIters === undefined ? {} : { max_iters: maxIters };
    const body = await this.enqueue(() =>
      this.request("POST", `/sessions/${sessionId}/generate`, payload),
    );
    return GenerateResponseSchema.parse(body);
  }

  async exportPlan(sessionId: string, format: "json" | "svg"): Promise<string> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/api/v1/sessions/${sessionId}/export?format=${format}`,
    );
    const text = await resp.text();
    if (!resp.ok) {
      const err = ApiErrorSchema.safeParse(JSON.parse(text));
      throw new ApiError(
        resp.status,
        err.success ? err.data.error.code : "unknown",
        err.success ? err.data.error.message : text,
      );
    }
    return text;
  }

  async deleteSession(sessionId: string): Promise<void> {
    await this.enqueue(() => this.request("DELETE", `/sessions/${sessionId}`));
  }
}
