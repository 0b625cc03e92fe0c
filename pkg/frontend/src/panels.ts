import { describeEvidence, evidenceKey, formatBadge } from "./format.js";
import type { CompareResult, QAExchange, RationalePayload } from "./types.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Hover panel: confidence, rationale, clickable related edges, evidence ids. */
export function renderRationalePanel(
  payload: RationalePayload,
  onEdgeClick: (edgeKey: string) => void,
): HTMLElement {
  const panel = el("div", "rationale-panel");
  panel.appendChild(el("div", "rationale-confidence", `confidence ${formatBadge(payload.confidence)}`));
  panel.appendChild(el("div", "rationale-text", payload.rationale));
  for (const [title, keys, cls] of [
    ["supporting", payload.supporting, "supporting"],
    ["conflicting", payload.conflicting, "conflicting"],
  ] as const) {
    const section = el("div", `rationale-${cls}`);
    section.appendChild(el("span", "rationale-label", `${title} (${keys.length})`));
    for (const key of keys) {
      const link = el("a", `edge-link ${cls}`, decodeURIComponent(key));
      link.setAttribute("data-edge-key", key);
      link.addEventListener("click", () => onEdgeClick(key));
      section.appendChild(link);
    }
    panel.appendChild(section);
  }
  const evidence = el("div", "rationale-evidence");
  evidence.appendChild(el("span", "rationale-label", "evidence records"));
  for (const recordId of payload.evidence) {
    evidence.appendChild(el("span", "evidence-id", recordId));
  }
  panel.appendChild(evidence);
  return panel;
}

export function renderRationaleUnavailable(): HTMLElement {
  return el("div", "rationale-panel rationale-missing", "no score available");
}

function renderExchange(
  title: string,
  exchange: QAExchange,
  flaggedKeys: Set<string>,
): HTMLElement {
  const side = el("div", "qa-side");
  side.appendChild(el("h3", "qa-title", title));
  side.appendChild(el("p", "qa-answer", exchange.answer));
  const list = el("ul", "qa-evidence");
  for (const row of exchange.evidence) {
    const item = el("li", "qa-evidence-row", describeEvidence(row));
    if (flaggedKeys.has(evidenceKey(row))) {
      item.classList.add("diff-flagged");
      item.title = "present on this side only";
    }
    list.appendChild(item);
  }
  side.appendChild(list);
  return side;
}

/**
 * Side-by-side answers. Evidence rows present on only one side (per the
 * server's evidence_diff) are visually flagged.
 */
export function renderComparePanel(result: CompareResult): HTMLElement {
  const panel = el("div", "compare-panel");
  panel.appendChild(
    renderExchange("baseline", result.baseline, new Set(result.evidence_diff.baseline_only)),
  );
  panel.appendChild(
    renderExchange(
      "confidence-aware",
      result.confidence_aware,
      new Set(result.evidence_diff.confidence_only),
    ),
  );
  return panel;
}
