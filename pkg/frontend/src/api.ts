import type {
  DetailResponse,
  FacetName,
  GroupPayload,
  HealthResponse,
  PageResponse,
  RecommendationPage,
  SearchResponse,
  TagWorkbooksResponse,
  TagsResponse,
} from "./types";

/** The slice of fetch() the client needs; tests inject a stub. */
export interface FetchLike {
  (url: string): Promise<{
    ok: boolean;
    status: number;
    json(): Promise<unknown>;
  }>;
}

/** A structured {code, message} error body from the service. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    const impl = fetchFn ?? (globalThis.fetch as FetchLike | undefined);
    if (!impl) {
      throw new Error("no fetch implementation available");
    }
    this.fetchFn = impl;
  }

  private async get<T>(path: string, params?: Record<string, string | number>): Promise<T> {
    let url = this.base + path;
    if (params) {
      const query = new URLSearchParams();
      for (const [key, value] of Object.entries(params)) {
        query.set(key, String(value));
      }
      url += "?" + query.toString();
    }
    const response = await this.fetchFn(url);
    const body = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
      throw new ServiceError(
        response.status,
        typeof body.code === "string" ? body.code : "unknown_error",
        typeof body.message === "string" ? body.message : `request failed: ${url}`,
      );
    }
    return body as T;
  }

  health(): Promise<HealthResponse> {
    return this.get("/healthz");
  }

  page(offset: number, limit: number): Promise<PageResponse> {
    return this.get("/workbooks", { offset, limit });
  }

  detail(id: string): Promise<DetailResponse> {
    return this.get(`/workbooks/${encodeURIComponent(id)}`);
  }

  recommendations(
    id: string,
    facet: FacetName,
    limit: number,
    offset = 0,
  ): Promise<RecommendationPage> {
    return this.get(`/workbooks/${encodeURIComponent(id)}/recommendations`, {
      facet,
      limit,
      offset,
    });
  }

  group(id: string): Promise<{ id: string; group: GroupPayload | null }> {
    return this.get(`/workbooks/${encodeURIComponent(id)}/group`);
  }

  search(query: string, limit = 24): Promise<SearchResponse> {
    return this.get("/search", { q: query, limit });
  }

  tags(): Promise<TagsResponse> {
    return this.get("/tags");
  }

  tagWorkbooks(tag: string): Promise<TagWorkbooksResponse> {
    return this.get(`/tags/${encodeURIComponent(tag)}/workbooks`);
  }
}
