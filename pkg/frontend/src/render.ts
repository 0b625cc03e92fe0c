import { edgeBadge, roleColor } from "./format.js";
import { computeLayout, type Point } from "./layout.js";
import type { GraphExport } from "./types.js";

export interface SceneNode {
  id: string;
  label: string;
  colorRole: string;
  fill: string;
  x: number;
  y: number;
}

export interface SceneEdge {
  key: string;
  relation: string;
  from: Point;
  to: Point;
  midpoint: Point;
  badge: string | null;
  highlighted: boolean;
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
}

/** Pure scene computation: everything the canvas pass needs, testable headless. */
export function buildScene(
  graph: GraphExport,
  width: number,
  height: number,
  highlightKeys: Set<string> = new Set(),
): Scene {
  const positions = computeLayout(graph, width, height);
  const nodes: SceneNode[] = graph.nodes.map((node) => {
    const p = positions.get(node.id) ?? { x: width / 2, y: height / 2 };
    return {
      id: node.id,
      label: node.label,
      colorRole: node.color_role,
      fill: roleColor(node.color_role),
      x: p.x,
      y: p.y,
    };
  });
  const edges: SceneEdge[] = [];
  for (const edge of graph.edges) {
    const from = positions.get(edge.source);
    const to = positions.get(edge.target);
    if (!from || !to) continue;
    edges.push({
      key: edge.key,
      relation: edge.relation,
      from,
      to,
      midpoint: { x: (from.x + to.x) / 2, y: (from.y + to.y) / 2 },
      badge: edgeBadge(edge.confidence, graph.variant_kind),
      highlighted: highlightKeys.has(edge.key),
    });
  }
  return { nodes, edges };
}

/** Badge hit-test for hover: nearest edge midpoint within the radius. */
export function edgeAt(scene: Scene, x: number, y: number, radius = 14): SceneEdge | null {
  let best: SceneEdge | null = null;
  let bestDist = radius * radius;
  for (const edge of scene.edges) {
    const dx = edge.midpoint.x - x;
    const dy = edge.midpoint.y - y;
    const d = dx * dx + dy * dy;
    if (d <= bestDist) {
      best = edge;
      bestDist = d;
    }
  }
  return best;
}

const NODE_RADIUS = 13;

export function drawScene(ctx: CanvasRenderingContext2D, scene: Scene, width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  ctx.font = "10px sans-serif";
  for (const edge of scene.edges) {
    ctx.strokeStyle = edge.highlighted ? "#ffb300" : "#b9c0c7";
    ctx.lineWidth = edge.highlighted ? 2.5 : 1.2;
    ctx.beginPath();
    ctx.moveTo(edge.from.x, edge.from.y);
    ctx.lineTo(edge.to.x, edge.to.y);
    ctx.stroke();
    if (edge.badge !== null) {
      const w = ctx.measureText(edge.badge).width + 8;
      ctx.fillStyle = edge.highlighted ? "#ffb300" : "#39434c";
      ctx.fillRect(edge.midpoint.x - w / 2, edge.midpoint.y - 8, w, 15);
      ctx.fillStyle = "#ffffff";
      ctx.textAlign = "center";
      ctx.fillText(edge.badge, edge.midpoint.x, edge.midpoint.y + 3);
    }
  }
  for (const node of scene.nodes) {
    ctx.beginPath();
    ctx.arc(node.x, node.y, NODE_RADIUS, 0, Math.PI * 2);
    ctx.fillStyle = node.fill;
    ctx.fill();
    ctx.strokeStyle = "#39434c";
    ctx.lineWidth = 1;
    ctx.stroke();
    ctx.fillStyle = "#222";
    ctx.textAlign = "center";
    ctx.fillText(node.label, node.x, node.y + NODE_RADIUS + 11);
  }
}
