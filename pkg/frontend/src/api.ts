import type {
  FeedbackKind,
  FeedbackResponse,
  GraphResponse,
  PaperDetail,
  RelatedResponse,
  SearchResponse,
} from "./types.js";

// Same-origin by default; tests and dev setups can point elsewhere.
let baseUrl = "";

export function setBaseUrl(url: string): void {
  baseUrl = url.replace(/\/$/, "");
}

async function getJson<T>(path: string): Promise<T> {
  const res = await fetch(baseUrl + path);
  if (!res.ok) {
    const body = await res.json().catch(() => ({ error: res.statusText }));
    throw new Error(body.error ?? `request failed (${res.status})`);
  }
  return res.json() as Promise<T>;
}

export function searchPapers(
  query: string,
  limit = 20,
  ratings = true,
): Promise<SearchResponse> {
  const params = new URLSearchParams({
    q: query,
    limit: String(limit),
    ratings: String(ratings),
  });
  return getJson(`/api/search?${params}`);
}

export function getPaper(id: string): Promise<PaperDetail> {
  return getJson(`/api/papers/${encodeURIComponent(id)}`);
}

export function getRelated(id: string, limit = 10): Promise<RelatedResponse> {
  return getJson(`/api/papers/${encodeURIComponent(id)}/related?limit=${limit}`);
}

export function getGraph(ids: string[], hops = 1): Promise<GraphResponse> {
  const params = new URLSearchParams({ ids: ids.join(","), hops: String(hops) });
  return getJson(`/api/graph?${params}`);
}

export async function postFeedback(
  user: string,
  kind: FeedbackKind,
  docId: string,
): Promise<FeedbackResponse> {
  const res = await fetch(`${baseUrl}/api/feedback`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ user, kind, doc_id: docId }),
  });
  if (res.status !== 202) {
    const body = await res.json().catch(() => ({ error: res.statusText }));
    throw new Error(body.error ?? `feedback rejected (${res.status})`);
  }
  return res.json() as Promise<FeedbackResponse>;
}
