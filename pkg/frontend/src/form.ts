import { ApiError, type ApiClient } from "./api.js";
import type { IngestReport, RecordDraft } from "./types.js";

export interface RecordFormResult {
  report: IngestReport | null;
  error: string | null;
}

function splitList(raw: string): string[] {
  return raw
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}

export function draftFromFields(fields: {
  subject: string;
  recordId: string;
  visitIndex: number;
  diagnoses: string;
  procedures: string;
  medications: string;
  note: string;
}): RecordDraft {
  const note = fields.note.trim();
  return {
    record_id: fields.recordId,
    subject_id: fields.subject,
    visit_index: fields.visitIndex,
    timestamp: new Date().toISOString(),
    source_kind: "structured",
    diagnoses: splitList(fields.diagnoses),
    procedures: splitList(fields.procedures),
    medications: splitList(fields.medications),
    ...(note ? { note_text: note } : {}),
  };
}

/**
 * Submit one record. On success the caller-provided refresh runs so the
 * canvas shows the evolved graph; on 409/422 the error is returned for
 * inline display and nothing refreshes.
 */
export async function submitRecord(
  api: ApiClient,
  draft: RecordDraft,
  refresh: () => Promise<unknown>,
): Promise<RecordFormResult> {
  try {
    const report = await api.ingestRecord(draft);
    await refresh();
    return { report, error: null };
  } catch (err) {
    if (err instanceof ApiError && (err.status === 409 || err.status === 422)) {
      return { report: null, error: err.message };
    }
    throw err;
  }
}
