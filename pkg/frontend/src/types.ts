// Shapes of the JSON the API serves. Field names must match the server
// exactly; nothing here is invented client-side.

export interface SearchResult {
  id: string;
  title: string;
  authors: string[];
  venue: string;
  published: string;
  text_score: number;
  network_rating: number;
  final_score: number;
  position: number;
  x: number | null;
  y: number | null;
}

export interface SearchResponse {
  version: number;
  results: SearchResult[];
}

export interface PaperDetail {
  version: number;
  id: string;
  title: string;
  authors: string[];
  venue: string;
  published: string;
  abstract: string;
  pagerank: number;
  reverse_pagerank: number;
  combined: number;
  x: number | null;
  y: number | null;
}

export interface RelatedEntry {
  id: string;
  weight: number;
}

export interface RelatedResponse {
  version: number;
  related: RelatedEntry[];
}

export interface GraphNode {
  id: string;
  x: number | null;
  y: number | null;
  combined: number;
  venue: string;
}

export interface GraphEdge {
  s: string;
  t: string;
  w: number;
}

export interface GraphResponse {
  version: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export type FeedbackKind = "star" | "click" | "library_add";

export interface FeedbackResponse {
  version: number;
  seq: number;
}

// One dot on the scatter plot. Derived 1:1 from a search result or a
// neighbor node; position comes from the server layout, never computed here.
export interface PlotNode {
  id: string;
  x: number;
  y: number;
  combined: number;
  venue: string;
  isNeighbor: boolean;
}
