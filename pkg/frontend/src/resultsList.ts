import type { SearchResult } from "./types.js";

export interface ListCallbacks {
  onSelect: (id: string) => void;
  onStar: (id: string) => void;
  onLibraryAdd: (id: string) => void;
}

// Renders results in exactly the order the API returned them (the server
// already sorted by final score; the client never re-sorts).
export function renderResults(
  container: HTMLElement,
  results: SearchResult[],
  callbacks: ListCallbacks,
  starred: Set<string>,
  shelved: Set<string>,
  selected?: string,
): void {
  container.textContent = "";
  if (results.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "no results";
    container.appendChild(empty);
    return;
  }
  const list = document.createElement("ol");
  list.className = "results";
  for (const r of results) {
    const item = document.createElement("li");
    item.dataset.id = r.id;
    item.dataset.finalScore = String(r.final_score);
    if (r.id === selected) item.classList.add("selected");

    const title = document.createElement("button");
    title.className = "title";
    title.type = "button";
    title.textContent = r.title || r.id;
    title.addEventListener("click", () => callbacks.onSelect(r.id));

    const meta = document.createElement("span");
    meta.className = "meta";
    meta.textContent = `${r.venue} ${r.published.slice(0, 4)} · final ${r.final_score.toFixed(3)}`;

    const star = document.createElement("button");
    star.type = "button";
    star.className = starred.has(r.id) ? "star starred" : "star";
    star.textContent = starred.has(r.id) ? "★" : "☆";
    star.title = "star";
    star.addEventListener("click", () => callbacks.onStar(r.id));

    const shelve = document.createElement("button");
    shelve.type = "button";
    shelve.className = shelved.has(r.id) ? "shelve shelved" : "shelve";
    shelve.textContent = "+lib";
    shelve.title = "add to library";
    shelve.addEventListener("click", () => callbacks.onLibraryAdd(r.id));

    item.append(title, meta, star, shelve);
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderError(banner: HTMLElement, message: string | null): void {
  banner.textContent = message ?? "";
  banner.classList.toggle("visible", message !== null);
}
