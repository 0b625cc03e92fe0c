import { ApiClient, ApiError } from "./api.js";
import { graphSummary } from "./format.js";
import { draftFromFields, submitRecord } from "./form.js";
import { renderComparePanel, renderRationalePanel, renderRationaleUnavailable } from "./panels.js";
import { buildScene, drawScene, edgeAt, type Scene } from "./render.js";
import { WorkbenchStore, TAU_MAX, TAU_MIN, TAU_STEP } from "./state.js";
import { ALL_VARIANTS, type GraphExport, type VariantKind } from "./types.js";

const api = new ApiClient("");
const store = new WorkbenchStore(api);

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = byId<HTMLCanvasElement>("graph-canvas");
const ctx = canvas.getContext("2d")!;
const summary = byId<HTMLDivElement>("graph-summary");
const placeholder = byId<HTMLDivElement>("graph-placeholder");
const rationaleHost = byId<HTMLDivElement>("rationale-host");
const compareHost = byId<HTMLDivElement>("compare-host");
const statusLine = byId<HTMLDivElement>("status-line");

let scene: Scene | null = null;
let highlight = new Set<string>();
let hoverKey: string | null = null;

function redraw(graph: GraphExport | null): void {
  if (!graph || graph.nodes.length === 0) {
    placeholder.style.display = "block";
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    scene = null;
    summary.textContent = graph ? graphSummary(graph) : "";
    return;
  }
  placeholder.style.display = "none";
  scene = buildScene(graph, canvas.width, canvas.height, highlight);
  drawScene(ctx, scene, canvas.width, canvas.height);
  summary.textContent = graphSummary(graph);
}

store.onGraph((graph) => {
  highlight = new Set();
  redraw(graph);
});

// -- subject directory -------------------------------------------------------

async function loadSubjects(selectId?: string): Promise<void> {
  const select = byId<HTMLSelectElement>("subject-select");
  const subjects = await api.listSubjects();
  select.innerHTML = "";
  for (const entry of subjects) {
    const option = document.createElement("option");
    option.value = entry.subject_id;
    option.textContent = `${entry.subject_id} (${entry.visits} visits)`;
    select.appendChild(option);
  }
  const target = selectId ?? subjects[0]?.subject_id;
  if (target) {
    select.value = target;
    await store.selectSubject(target);
  }
}

byId<HTMLSelectElement>("subject-select").addEventListener("change", (event) => {
  void store.selectSubject((event.target as HTMLSelectElement).value);
});

// -- variant selector and threshold slider ------------------------------------

const variantSelect = byId<HTMLSelectElement>("variant-select");
for (const variant of ALL_VARIANTS) {
  const option = document.createElement("option");
  option.value = variant;
  option.textContent = variant;
  variantSelect.appendChild(option);
}
variantSelect.value = store.state.variant;
variantSelect.addEventListener("change", () => {
  void store.selectVariant(variantSelect.value as VariantKind);
});

const tauSlider = byId<HTMLInputElement>("tau-slider");
tauSlider.min = String(TAU_MIN);
tauSlider.max = String(TAU_MAX);
tauSlider.step = String(TAU_STEP);
tauSlider.value = String(store.state.tau);
const tauValue = byId<HTMLSpanElement>("tau-value");
tauValue.textContent = store.state.tau.toFixed(1);
tauSlider.addEventListener("change", () => {
  const tau = Number(tauSlider.value);
  tauValue.textContent = tau.toFixed(1);
  void store.setTau(tau);
});

// -- hover rationale -----------------------------------------------------------

canvas.addEventListener("mousemove", (event) => {
  if (!scene || !store.state.subject) return;
  const rect = canvas.getBoundingClientRect();
  const edge = edgeAt(scene, event.clientX - rect.left, event.clientY - rect.top);
  if (!edge) {
    hoverKey = null;
    rationaleHost.innerHTML = "";
    return;
  }
  if (edge.key === hoverKey) return;
  hoverKey = edge.key;
  api
    .fetchRationale(store.state.subject, edge.key)
    .then((payload) => {
      rationaleHost.innerHTML = "";
      rationaleHost.appendChild(
        renderRationalePanel(payload, (clicked) => {
          highlight = new Set([clicked]);
          redraw(store.graph);
        }),
      );
    })
    .catch((err) => {
      rationaleHost.innerHTML = "";
      if (err instanceof ApiError && err.status === 404) {
        rationaleHost.appendChild(renderRationaleUnavailable());
      }
    });
});

canvas.addEventListener("mouseleave", () => {
  hoverKey = null;
  rationaleHost.innerHTML = "";
});

// -- comparative QA panel --------------------------------------------------------

byId<HTMLButtonElement>("qa-run").addEventListener("click", async () => {
  store.setQuestion(byId<HTMLInputElement>("question-input").value);
  store.setTopK(Number(byId<HTMLInputElement>("topk-input").value || "5"));
  try {
    const result = await store.runCompare();
    compareHost.innerHTML = "";
    if (result) compareHost.appendChild(renderComparePanel(result));
  } catch (err) {
    compareHost.innerHTML = "";
    const note = document.createElement("div");
    note.className = "qa-error";
    note.textContent = err instanceof ApiError ? err.message : String(err);
    compareHost.appendChild(note);
  }
});

// -- record form ------------------------------------------------------------------

byId<HTMLButtonElement>("record-submit").addEventListener("click", async () => {
  const errorHost = byId<HTMLDivElement>("record-error");
  errorHost.textContent = "";
  const subject =
    byId<HTMLInputElement>("record-subject").value || store.state.subject || "";
  const draft = draftFromFields({
    subject,
    recordId: byId<HTMLInputElement>("record-id").value,
    visitIndex: Number(byId<HTMLInputElement>("record-visit").value || "0"),
    diagnoses: byId<HTMLInputElement>("record-diagnoses").value,
    procedures: byId<HTMLInputElement>("record-procedures").value,
    medications: byId<HTMLInputElement>("record-medications").value,
    note: byId<HTMLTextAreaElement>("record-note").value,
  });
  const outcome = await submitRecord(api, draft, async () => {
    if (store.state.subject === subject) {
      await store.recordIngested();
    } else {
      await loadSubjects(subject);
    }
  });
  if (outcome.error) {
    errorHost.textContent = outcome.error;
  } else if (outcome.report) {
    statusLine.textContent =
      `ingested ${outcome.report.record_id}: v${outcome.report.version}, ` +
      `${outcome.report.n_triples} triples, ${outcome.report.n_unmapped} unmapped`;
  }
});

void loadSubjects();
