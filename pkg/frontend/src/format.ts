import type { EvidenceRow, GraphExport } from "./types.js";

/** Node fill colors by role; the server sends the role, this maps it to CSS. */
export const ROLE_COLORS: Record<string, string> = {
  red: "#e05252",
  white: "#f5f5f5",
  brown: "#a5694f",
  green: "#5fae5f",
  pink: "#e68ab4",
  gray: "#9aa0a6",
};

export function roleColor(colorRole: string): string {
  return ROLE_COLORS[colorRole] ?? ROLE_COLORS.gray;
}

/** Numeric badge shown on score-bearing edges: always two decimals. */
export function formatBadge(confidence: number): string {
  return confidence.toFixed(2);
}

export function isScoreBearing(variant: string): boolean {
  return variant === "confidence_aware" || variant === "filtered";
}

/** Badge text for an edge, or null when the variant carries no scores. */
export function edgeBadge(
  confidence: number | undefined,
  variantKind: string,
): string | null {
  if (!isScoreBearing(variantKind) || confidence === undefined) return null;
  return formatBadge(confidence);
}

export function evidenceKey(row: EvidenceRow): string {
  return `${row.head}|${row.relation}|${row.tail}`;
}

/** Human line for an evidence row; confidence shown only when present. */
export function describeEvidence(row: EvidenceRow): string {
  const base = `${row.head} —${row.relation}→ ${row.tail} (visit ${row.first_seen})`;
  return row.confidence === undefined ? base : `${base} [${formatBadge(row.confidence)}]`;
}

export function graphSummary(graph: GraphExport): string {
  const tau = graph.tau === undefined ? "" : ` tau=${graph.tau.toFixed(1)}`;
  return `${graph.subject_id} · ${graph.variant_kind}${tau} · v${graph.version} · ${graph.nodes.length} nodes / ${graph.edges.length} edges`;
}
