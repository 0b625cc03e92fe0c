/** Payload types mirroring the JSON API. */

export type VariantKind =
  | "latest"
  | "historical"
  | "enriched"
  | "confidence_aware"
  | "filtered";

export const ALL_VARIANTS: VariantKind[] = [
  "latest",
  "historical",
  "enriched",
  "confidence_aware",
  "filtered",
];

export interface GraphNode {
  id: string;
  label: string;
  entity_type: string;
  color_role: string;
}

export interface GraphEdge {
  key: string;
  source: string;
  relation: string;
  target: string;
  first_seen: number;
  evidence: string[];
  confidence?: number;
  rationale?: string;
  supporting?: string[];
  conflicting?: string[];
}

export interface GraphExport {
  schema_version: number;
  subject_id: string;
  variant_kind: VariantKind;
  version: number;
  tau?: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface RationalePayload {
  key: string;
  confidence: number;
  rationale: string;
  supporting: string[];
  conflicting: string[];
  evidence: string[];
}

export interface EvidenceRow {
  head: string;
  relation: string;
  tail: string;
  first_seen: number;
  evidence: string[];
  confidence?: number;
}

export interface QAExchange {
  request: { mode: string; tau: number | null; top_k: number };
  evidence: EvidenceRow[];
  answer: string;
  generator_id: string;
}

export interface CompareResult {
  baseline: QAExchange;
  confidence_aware: QAExchange;
  evidence_diff: { baseline_only: string[]; confidence_only: string[] };
}

export interface IngestReport {
  subject_id: string;
  record_id: string;
  version: number;
  n_triples: number;
  n_unmapped: number;
}

export interface SubjectEntry {
  subject_id: string;
  visits: number;
}

export interface RecordDraft {
  record_id: string;
  subject_id: string;
  visit_index: number;
  timestamp: string;
  source_kind: "structured" | "free_text";
  diagnoses: string[];
  procedures: string[];
  medications: string[];
  note_text?: string;
}
