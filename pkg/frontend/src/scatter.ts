import { venueColor } from "./palette.js";
import type { PlotNode } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const PLOT_SIZE = 560;
const MARGIN = 24;

// Node area is an affine function of the combined rating, so area ordering
// always equals rating ordering. Radius is derived from area, not the
// other way around.
const AREA_MIN = 12;
const AREA_SPAN = 240;

export function nodeArea(combined: number): number {
  return AREA_MIN + AREA_SPAN * combined;
}

export function nodeRadius(combined: number): number {
  return Math.sqrt(nodeArea(combined) / Math.PI);
}

export interface ScatterCallbacks {
  onNodeClick: (id: string) => void;
  onCanvasClick?: () => void;
}

function scale(values: number[], lo: number, hi: number): (v: number) => number {
  const min = Math.min(...values);
  const max = Math.max(...values);
  const span = max - min || 1;
  return (v) => lo + ((v - min) / span) * (hi - lo);
}

export function renderScatter(
  container: HTMLElement,
  nodes: PlotNode[],
  callbacks: ScatterCallbacks,
  selected?: string,
  highlighted?: Set<string>,
): SVGSVGElement {
  container.textContent = "";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${PLOT_SIZE} ${PLOT_SIZE}`);
  svg.setAttribute("class", "scatter");
  svg.addEventListener("click", (ev) => {
    if (ev.target === svg) callbacks.onCanvasClick?.();
  });

  if (nodes.length > 0) {
    const sx = scale(nodes.map((n) => n.x), MARGIN, PLOT_SIZE - MARGIN);
    // screen y grows downward; flip so the layout reads the usual way up
    const sy = scale(nodes.map((n) => n.y), PLOT_SIZE - MARGIN, MARGIN);

    // draw small nodes last so big ones never swallow their clicks
    const order = [...nodes].sort((a, b) => b.combined - a.combined);
    for (const node of order) {
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(sx(node.x)));
      circle.setAttribute("cy", String(sy(node.y)));
      circle.setAttribute("r", String(nodeRadius(node.combined)));
      circle.setAttribute("fill", venueColor(node.venue));
      circle.setAttribute("data-id", node.id);
      circle.setAttribute("data-combined", String(node.combined));
      let cls = node.isNeighbor ? "node neighbor" : "node";
      if (node.id === selected) cls += " selected";
      if (highlighted?.has(node.id)) cls += " highlighted";
      circle.setAttribute("class", cls);
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = node.id;
      circle.appendChild(title);
      circle.addEventListener("click", (ev) => {
        ev.stopPropagation();
        callbacks.onNodeClick(node.id);
      });
      svg.appendChild(circle);
    }
  }
  container.appendChild(svg);
  return svg;
}
