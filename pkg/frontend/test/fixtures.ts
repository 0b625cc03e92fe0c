import type { CompareResult, GraphExport, RationalePayload } from "../src/types.js";

/** One node of every entity type, so every color role is exercised. */
export function allRolesGraph(): GraphExport {
  return {
    schema_version: 1,
    subject_id: "p-1",
    variant_kind: "confidence_aware",
    version: 3,
    nodes: [
      { id: "p-1", label: "p-1", entity_type: "Subject", color_role: "red" },
      { id: "p-1:visit:0", label: "visit 0", entity_type: "Visit", color_role: "white" },
      { id: "D_HTN", label: "hypertension", entity_type: "Disease", color_role: "brown" },
      { id: "P_ECHO", label: "echocardiogram", entity_type: "Procedure", color_role: "green" },
      { id: "M_ASA", label: "aspirin", entity_type: "Medication", color_role: "pink" },
      { id: "C_SMOKER", label: "smoker", entity_type: "Concept", color_role: "gray" },
    ],
    edges: [
      {
        key: "k1",
        source: "p-1",
        relation: "has_visit",
        target: "p-1:visit:0",
        first_seen: 0,
        evidence: ["r0"],
        confidence: 0.8,
        rationale: "r",
        supporting: [],
        conflicting: [],
      },
      {
        key: "k2",
        source: "p-1:visit:0",
        relation: "prescribed",
        target: "M_ASA",
        first_seen: 0,
        evidence: ["r0"],
        confidence: 0.912345,
        rationale: "r",
        supporting: ["k1"],
        conflicting: [],
      },
    ],
  };
}

export function historicalGraph(): GraphExport {
  const graph = allRolesGraph();
  return {
    ...graph,
    variant_kind: "historical",
    edges: graph.edges.map(({ confidence, rationale, supporting, conflicting, ...rest }) => rest),
  };
}

export function rationalePayload(): RationalePayload {
  return {
    key: "k2",
    confidence: 0.9,
    rationale: "source=0.80; repetition=0.40",
    supporting: ["k1"],
    conflicting: ["k3"],
    evidence: ["r0", "r1"],
  };
}

export function compareResult(): CompareResult {
  const noisy = {
    head: "p-1:visit:4",
    relation: "mentioned",
    tail: "M_ASA",
    first_seen: 4,
    evidence: ["r4"],
  };
  const good = {
    head: "p-1:visit:4",
    relation: "prescribed",
    tail: "M_WARF",
    first_seen: 4,
    evidence: ["r4"],
  };
  return {
    baseline: {
      request: { mode: "baseline", tau: null, top_k: 5 },
      evidence: [noisy, good],
      answer: "baseline answer",
      generator_id: "deterministic",
    },
    confidence_aware: {
      request: { mode: "confidence_aware", tau: 0.8, top_k: 5 },
      evidence: [{ ...good, confidence: 0.91 }],
      answer: "confidence answer",
      generator_id: "deterministic",
    },
    evidence_diff: {
      baseline_only: ["p-1:visit:4|mentioned|M_ASA"],
      confidence_only: [],
    },
  };
}
