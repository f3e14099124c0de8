import { beforeEach, describe, expect, it, vi } from "vitest";
import { venueColor } from "../src/palette.js";
import { nodeArea, nodeRadius, renderScatter } from "../src/scatter.js";
import type { PlotNode } from "../src/types.js";

function node(
  id: string,
  combined: number,
  venue = "V",
  x = Math.random() * 10,
  y = Math.random() * 10,
): PlotNode {
  return { id, x, y, combined, venue, isNeighbor: false };
}

let box: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="box"></div>';
  box = document.getElementById("box")!;
});

describe("node sizing", () => {
  it("area is strictly monotone in the combined rating", () => {
    let prev = -Infinity;
    for (const c of [0, 0.1, 0.3, 0.5, 0.9, 1.0]) {
      const area = nodeArea(c);
      expect(area).toBeGreaterThan(prev);
      prev = area;
    }
  });

  it("radius encodes area, not rating, so area ordering survives", () => {
    const r1 = nodeRadius(0.3);
    const r2 = nodeRadius(0.9);
    expect(Math.PI * r2 * r2).toBeCloseTo(nodeArea(0.9), 10);
    expect(Math.PI * r1 * r1).toBeCloseTo(nodeArea(0.3), 10);
    expect(r2).toBeGreaterThan(r1);
  });

  it("rendered circles preserve rating order as area order", () => {
    const nodes = [
      node("a", 0.9),
      node("b", 0.3),
      node("c", 0.55),
      node("d", 0.02),
    ];
    renderScatter(box, nodes, { onNodeClick: () => {} });
    const circles = [...box.querySelectorAll("circle")];
    expect(circles).toHaveLength(4);
    const byRating = [...circles].sort(
      (a, b) => Number(b.dataset.combined) - Number(a.dataset.combined),
    );
    const areas = byRating.map((c) => {
      const r = Number(c.getAttribute("r"));
      return Math.PI * r * r;
    });
    for (let i = 1; i < areas.length; i++) {
      expect(areas[i - 1]).toBeGreaterThan(areas[i]);
    }
  });
});

describe("node coloring", () => {
  it("same venue means same fill, different venue may differ", () => {
    const nodes = [
      node("a", 0.5, "Journal One"),
      node("b", 0.7, "Journal One"),
      node("c", 0.2, "Journal Two"),
    ];
    renderScatter(box, nodes, { onNodeClick: () => {} });
    const fill = (id: string) =>
      box.querySelector(`circle[data-id="${id}"]`)!.getAttribute("fill");
    expect(fill("a")).toBe(fill("b"));
    expect(fill("a")).toBe(venueColor("Journal One"));
    expect(fill("c")).toBe(venueColor("Journal Two"));
  });
});

describe("geometry", () => {
  it("uses server coordinates: x ordering is preserved on screen", () => {
    const nodes = [
      node("left", 0.5, "V", -4.0, 0.0),
      node("mid", 0.5, "V", 0.0, 0.0),
      node("right", 0.5, "V", 3.0, 0.0),
    ];
    renderScatter(box, nodes, { onNodeClick: () => {} });
    const cx = (id: string) =>
      Number(box.querySelector(`circle[data-id="${id}"]`)!.getAttribute("cx"));
    expect(cx("left")).toBeLessThan(cx("mid"));
    expect(cx("mid")).toBeLessThan(cx("right"));
  });

  it("flips y so larger layout y is higher on screen", () => {
    const nodes = [node("low", 0.5, "V", 0, -2), node("high", 0.5, "V", 0, 5)];
    renderScatter(box, nodes, { onNodeClick: () => {} });
    const cy = (id: string) =>
      Number(box.querySelector(`circle[data-id="${id}"]`)!.getAttribute("cy"));
    expect(cy("high")).toBeLessThan(cy("low"));
  });

  it("renders an empty svg for no nodes", () => {
    renderScatter(box, [], { onNodeClick: () => {} });
    expect(box.querySelector("svg")).not.toBeNull();
    expect(box.querySelectorAll("circle")).toHaveLength(0);
  });
});

describe("interaction", () => {
  it("clicking a circle reports that node id", () => {
    const clicks: string[] = [];
    renderScatter(box, [node("a", 0.4), node("b", 0.6)], {
      onNodeClick: (id) => clicks.push(id),
    });
    (box.querySelector('circle[data-id="a"]') as SVGCircleElement).dispatchEvent(
      new MouseEvent("click", { bubbles: true }),
    );
    expect(clicks).toEqual(["a"]);
  });

  it("clicking the bare canvas reports canvas, not a node", () => {
    const onNodeClick = vi.fn();
    const onCanvasClick = vi.fn();
    const svg = renderScatter(box, [node("a", 0.4)], { onNodeClick, onCanvasClick });
    svg.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(onNodeClick).not.toHaveBeenCalled();
    expect(onCanvasClick).toHaveBeenCalledTimes(1);
  });

  it("marks selection and neighbor highlights with classes", () => {
    const nodes = [node("a", 0.4), node("b", 0.6), node("c", 0.2)];
    renderScatter(box, nodes, { onNodeClick: () => {} }, "a", new Set(["b"]));
    expect(box.querySelector('circle[data-id="a"]')!.getAttribute("class")).toContain(
      "selected",
    );
    expect(box.querySelector('circle[data-id="b"]')!.getAttribute("class")).toContain(
      "highlighted",
    );
    expect(box.querySelector('circle[data-id="c"]')!.getAttribute("class")).toBe("node");
  });
});
