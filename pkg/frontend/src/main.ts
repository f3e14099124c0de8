import { getGraph, getPaper, getRelated, searchPapers } from "./api.js";
import { FeedbackGuard } from "./feedback.js";
import { renderError, renderResults } from "./resultsList.js";
import { renderScatter } from "./scatter.js";
import {
  applySearchResponse,
  initialState,
  localUser,
  plotNodes,
  SearchToken,
  ViewState,
} from "./state.js";
import type { PaperDetail } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function mount(): void {
  const form = el<HTMLFormElement>("search-form");
  if (form.dataset.mounted) return; // listeners attach once per page
  form.dataset.mounted = "1";
  const input = el<HTMLInputElement>("search-input");
  const banner = el<HTMLElement>("error-banner");
  const listBox = el<HTMLElement>("results");
  const plotBox = el<HTMLElement>("plot");
  const detailBox = el<HTMLElement>("detail");
  const neighborToggle = el<HTMLInputElement>("neighbor-toggle");

  let state: ViewState = initialState();
  const token = new SearchToken();
  const guard = new FeedbackGuard(localUser(window.localStorage));

  function redraw(): void {
    renderResults(
      listBox,
      state.results,
      { onSelect: select, onStar: star, onLibraryAdd: shelve },
      guard.starred,
      guard.shelved,
      state.selected ?? undefined,
    );
    renderScatter(
      plotBox,
      plotNodes(state),
      { onNodeClick: select, onCanvasClick: clearSelection },
      state.selected ?? undefined,
      state.highlighted,
    );
    renderError(banner, state.error);
  }

  function renderDetail(detail: PaperDetail | null): void {
    detailBox.textContent = "";
    if (!detail) return;
    const h = document.createElement("h2");
    h.textContent = detail.title || detail.id;
    const meta = document.createElement("p");
    meta.className = "meta";
    meta.textContent =
      `${detail.authors.join(", ")} · ${detail.venue} · ${detail.published} · ` +
      `rating ${detail.combined.toFixed(3)}`;
    const abs = document.createElement("p");
    abs.textContent = detail.abstract;
    detailBox.append(h, meta, abs);
  }

  async function runSearch(query: string): Promise<void> {
    const mine = token.issue();
    try {
      const response = await searchPapers(query);
      if (!token.isLatest(mine)) return; // a newer query superseded this one
      state = applySearchResponse(state, query, response);
      renderDetail(null);
      redraw();
      if (state.showNeighbors) void loadNeighbors(mine);
    } catch (err) {
      if (!token.isLatest(mine)) return;
      state = { ...state, error: (err as Error).message };
      redraw(); // list from the previous response stays on screen
    }
  }

  async function loadNeighbors(mine: number): Promise<void> {
    const ids = state.results.map((r) => r.id);
    if (ids.length === 0) return;
    try {
      const graph = await getGraph(ids, 1);
      if (!token.isLatest(mine)) return;
      state = {
        ...state,
        neighbors: graph.nodes
          .filter((n) => n.x !== null && n.y !== null)
          .map((n) => ({
            id: n.id,
            x: n.x as number,
            y: n.y as number,
            combined: n.combined,
            venue: n.venue,
            isNeighbor: true,
          })),
      };
      redraw();
    } catch {
      // neighbor context is decoration; the plot of results stands alone
    }
  }

  function select(id: string): void {
    guard.click(id); // exactly one click event per selection gesture
    state = { ...state, selected: id };
    redraw();
    void (async () => {
      try {
        const [detail, related] = await Promise.all([getPaper(id), getRelated(id)]);
        if (state.selected !== id) return;
        state = { ...state, highlighted: new Set(related.related.map((r) => r.id)) };
        renderDetail(detail);
        redraw();
      } catch (err) {
        state = { ...state, error: (err as Error).message };
        redraw();
      }
    })();
  }

  function clearSelection(): void {
    state = { ...state, selected: null, highlighted: new Set() };
    renderDetail(null);
    redraw();
  }

  function star(id: string): void {
    guard.star(id);
    redraw();
  }

  function shelve(id: string): void {
    guard.libraryAdd(id);
    redraw();
  }

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const query = input.value.trim();
    if (query) void runSearch(query);
  });

  neighborToggle.addEventListener("change", () => {
    state = { ...state, showNeighbors: neighborToggle.checked };
    redraw();
    if (state.showNeighbors) void loadNeighbors(token.latest());
  });

  redraw();
}

if (typeof document !== "undefined" && document.getElementById("search-form")) {
  mount();
}
