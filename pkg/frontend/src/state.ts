import type { PlotNode, SearchResponse, SearchResult } from "./types.js";

export interface ViewState {
  query: string;
  results: SearchResult[];
  neighbors: PlotNode[];
  selected: string | null;
  highlighted: Set<string>;
  showNeighbors: boolean;
  error: string | null;
}

export function initialState(): ViewState {
  return {
    query: "",
    results: [],
    neighbors: [],
    selected: null,
    highlighted: new Set(),
    showNeighbors: false,
    error: null,
  };
}

// The plot is derived from the current response: every result with
// coordinates, plus (behind the toggle) fetched 1-hop neighbors that are
// not already results.
export function plotNodes(state: ViewState): PlotNode[] {
  const nodes: PlotNode[] = [];
  const seen = new Set<string>();
  for (const r of state.results) {
    if (r.x === null || r.y === null) continue;
    nodes.push({
      id: r.id,
      x: r.x,
      y: r.y,
      combined: r.network_rating,
      venue: r.venue,
      isNeighbor: false,
    });
    seen.add(r.id);
  }
  if (state.showNeighbors) {
    for (const n of state.neighbors) {
      if (!seen.has(n.id)) nodes.push(n);
    }
  }
  return nodes;
}

// At most one in-flight search; a response only lands if its token is
// still the latest one issued.
export class SearchToken {
  private current = 0;

  issue(): number {
    return ++this.current;
  }

  latest(): number {
    return this.current;
  }

  isLatest(token: number): boolean {
    return token === this.current;
  }
}

export function applySearchResponse(
  state: ViewState,
  query: string,
  response: SearchResponse,
): ViewState {
  return {
    ...state,
    query,
    results: response.results,
    neighbors: [],
    selected: null,
    highlighted: new Set(),
    error: null,
  };
}

const USER_KEY = "etymo-user";

export function localUser(storage: Pick<Storage, "getItem" | "setItem">): string {
  try {
    const existing = storage.getItem(USER_KEY);
    if (existing) return existing;
    const fresh = `u-${Math.random().toString(36).slice(2, 10)}`;
    storage.setItem(USER_KEY, fresh);
    return fresh;
  } catch {
    return `u-${Math.random().toString(36).slice(2, 10)}`;
  }
}
