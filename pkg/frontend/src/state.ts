import type { ApiClient } from "./api.js";
import type { CompareResult, GraphExport, VariantKind } from "./types.js";

export interface ViewState {
  subject: string | null;
  variant: VariantKind;
  tau: number; // slider value in [0, 1], step 0.1
  topK: number;
  question: string;
  lastCompare: CompareResult | null;
  hoverEdgeKey: string | null;
}

export const TAU_MIN = 0;
export const TAU_MAX = 1;
export const TAU_STEP = 0.1;

type GraphListener = (graph: GraphExport) => void;

/**
 * Single source of truth for the workbench. Every displayed number comes
 * from a service response; the store never computes confidence client-side.
 * Each state change that affects the graph issues exactly one fetch.
 */
export class WorkbenchStore {
  readonly state: ViewState = {
    subject: null,
    variant: "confidence_aware",
    tau: 0.8,
    topK: 5,
    question: "",
    lastCompare: null,
    hoverEdgeKey: null,
  };
  graph: GraphExport | null = null;
  fetchCount = 0;
  private listeners: GraphListener[] = [];

  constructor(private api: ApiClient) {}

  onGraph(listener: GraphListener): void {
    this.listeners.push(listener);
  }

  private async refetch(): Promise<GraphExport | null> {
    if (this.state.subject === null) return null;
    this.fetchCount += 1;
    const tau = this.state.variant === "filtered" ? this.state.tau : null;
    const graph = await this.api.fetchGraph(this.state.subject, this.state.variant, tau);
    this.graph = graph;
    for (const listener of this.listeners) listener(graph);
    return graph;
  }

  selectSubject(subject: string): Promise<GraphExport | null> {
    this.state.subject = subject;
    return this.refetch();
  }

  selectVariant(variant: VariantKind): Promise<GraphExport | null> {
    this.state.variant = variant;
    return this.refetch();
  }

  /** Slider movement: re-fetches only when the filtered view depends on tau. */
  setTau(tau: number): Promise<GraphExport | null> {
    this.state.tau = Math.round(tau * 10) / 10;
    if (this.state.variant === "filtered") {
      return this.refetch();
    }
    return Promise.resolve(this.graph);
  }

  setTopK(topK: number): void {
    this.state.topK = Math.max(1, Math.floor(topK));
  }

  setQuestion(question: string): void {
    this.state.question = question;
  }

  /** Called after a successful ingest: the current view re-fetches once. */
  recordIngested(): Promise<GraphExport | null> {
    return this.refetch();
  }

  async runCompare(): Promise<CompareResult | null> {
    if (this.state.subject === null || !this.state.question.trim()) return null;
    const result = await this.api.compare(
      this.state.subject,
      this.state.question,
      this.state.tau,
      this.state.topK,
    );
    this.state.lastCompare = result;
    return result;
  }
}
