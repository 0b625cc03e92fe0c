import { describe, expect, it } from "vitest";

import { computeLayout, mulberry32 } from "../src/layout.js";
import { buildScene, edgeAt } from "../src/render.js";
import { allRolesGraph } from "./fixtures.js";

describe("seeded layout", () => {
  it("is deterministic for repeated renders of the same export", () => {
    const graph = allRolesGraph();
    const a = computeLayout(graph, 800, 600);
    const b = computeLayout(graph, 800, 600);
    expect([...a.entries()]).toEqual([...b.entries()]);
  });

  it("ignores node declaration order", () => {
    const graph = allRolesGraph();
    const shuffled = { ...graph, nodes: [...graph.nodes].reverse() };
    expect([...computeLayout(graph, 800, 600).entries()].sort()).toEqual(
      [...computeLayout(shuffled, 800, 600).entries()].sort(),
    );
  });

  it("keeps every node inside the viewport", () => {
    const positions = computeLayout(allRolesGraph(), 400, 300);
    for (const point of positions.values()) {
      expect(point.x).toBeGreaterThanOrEqual(0);
      expect(point.x).toBeLessThanOrEqual(400);
      expect(point.y).toBeGreaterThanOrEqual(0);
      expect(point.y).toBeLessThanOrEqual(300);
    }
  });

  it("prng stream is stable", () => {
    const a = mulberry32(42);
    const b = mulberry32(42);
    for (let i = 0; i < 10; i++) expect(a()).toBe(b());
  });
});

describe("hover hit testing", () => {
  it("finds the edge whose badge midpoint is under the cursor", () => {
    const scene = buildScene(allRolesGraph(), 800, 600);
    const edge = scene.edges[1];
    const hit = edgeAt(scene, edge.midpoint.x + 3, edge.midpoint.y - 2);
    expect(hit?.key).toBe(edge.key);
  });

  it("returns null away from any edge", () => {
    const scene = buildScene(allRolesGraph(), 800, 600);
    expect(edgeAt(scene, 1, 1)).toBeNull();
  });
});
