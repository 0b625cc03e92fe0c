import type { GraphExport } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

/** Deterministic 32-bit PRNG so repeated layouts of one export are stable. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const LAYOUT_SEED = 0x5eed;
const ITERATIONS = 120;

/**
 * Seeded force-directed layout: spring attraction along edges, pairwise
 * repulsion, centering pull. Node order is fixed (sorted ids), the PRNG seed
 * is constant, and no wall-clock input is used, so the same export always
 * produces the same positions.
 */
export function computeLayout(
  graph: GraphExport,
  width: number,
  height: number,
): Map<string, Point> {
  const ids = graph.nodes.map((n) => n.id).sort();
  const rng = mulberry32(LAYOUT_SEED);
  const positions = new Map<string, Point>();
  for (const id of ids) {
    positions.set(id, {
      x: width * (0.15 + 0.7 * rng()),
      y: height * (0.15 + 0.7 * rng()),
    });
  }
  const edges = graph.edges
    .filter((e) => positions.has(e.source) && positions.has(e.target))
    .map((e) => [e.source, e.target] as const);

  const repulsion = (width * height) / Math.max(ids.length, 1) / 14;
  const springLength = Math.min(width, height) / 5;

  for (let iter = 0; iter < ITERATIONS; iter++) {
    const cooling = 1 - iter / ITERATIONS;
    const forces = new Map<string, Point>(ids.map((id) => [id, { x: 0, y: 0 }]));

    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = positions.get(ids[i])!;
        const b = positions.get(ids[j])!;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const dist2 = Math.max(dx * dx + dy * dy, 1);
        const push = repulsion / dist2;
        const fa = forces.get(ids[i])!;
        const fb = forces.get(ids[j])!;
        fa.x += dx * push;
        fa.y += dy * push;
        fb.x -= dx * push;
        fb.y -= dy * push;
      }
    }
    for (const [source, target] of edges) {
      const a = positions.get(source)!;
      const b = positions.get(target)!;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const dist = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = (dist - springLength) / dist / 18;
      const fa = forces.get(source)!;
      const fb = forces.get(target)!;
      fa.x += dx * pull;
      fa.y += dy * pull;
      fb.x -= dx * pull;
      fb.y -= dy * pull;
    }
    for (const id of ids) {
      const p = positions.get(id)!;
      const f = forces.get(id)!;
      f.x += (width / 2 - p.x) / 220; // gentle centering
      f.y += (height / 2 - p.y) / 220;
      p.x += f.x * cooling * 6;
      p.y += f.y * cooling * 6;
      p.x = Math.min(width - 24, Math.max(24, p.x));
      p.y = Math.min(height - 24, Math.max(24, p.y));
    }
  }
  return positions;
}
