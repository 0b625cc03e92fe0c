import type {
  CompareResult,
  GraphExport,
  IngestReport,
  RationalePayload,
  RecordDraft,
  SubjectEntry,
  VariantKind,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public body: unknown = null,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the JSON API; fetch is injectable for tests. */
export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const message =
        body && typeof body === "object" && "error" in (body as object)
          ? String((body as { error: unknown }).error)
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, message, body);
    }
    return body as T;
  }

  async listSubjects(): Promise<SubjectEntry[]> {
    const body = await this.request<{ subjects: SubjectEntry[] }>("/subjects");
    return body.subjects;
  }

  fetchGraph(subject: string, variant: VariantKind, tau: number | null): Promise<GraphExport> {
    const params = new URLSearchParams({ variant });
    if (variant === "filtered" && tau !== null) {
      params.set("tau", tau.toFixed(1));
    }
    return this.request<GraphExport>(
      `/subjects/${encodeURIComponent(subject)}/graph?${params.toString()}`,
    );
  }

  fetchRationale(subject: string, edgeKey: string): Promise<RationalePayload> {
    return this.request<RationalePayload>(
      `/subjects/${encodeURIComponent(subject)}/edges/${edgeKey}/rationale`,
    );
  }

  compare(
    subject: string,
    question: string,
    tau: number | null,
    topK: number,
  ): Promise<CompareResult> {
    return this.request<CompareResult>("/qa", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        subject_id: subject,
        question,
        tau,
        top_k: topK,
        compare: true,
      }),
    });
  }

  ingestRecord(record: RecordDraft): Promise<IngestReport> {
    return this.request<IngestReport>(
      `/subjects/${encodeURIComponent(record.subject_id)}/records`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(record),
      },
    );
  }
}
