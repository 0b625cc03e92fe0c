import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { WorkbenchStore, TAU_MAX, TAU_MIN, TAU_STEP } from "../src/state.js";
import { ALL_VARIANTS } from "../src/types.js";
import { allRolesGraph } from "./fixtures.js";

function countingClient(): { api: ApiClient; urls: string[] } {
  const urls: string[] = [];
  const fetchImpl = async (input: string) => {
    urls.push(input);
    return new Response(JSON.stringify(allRolesGraph()), { status: 200 });
  };
  return { api: new ApiClient("", fetchImpl), urls };
}

describe("workbench store", () => {
  it("exposes the slider contract: range [0, 1], step 0.1", () => {
    expect(TAU_MIN).toBe(0);
    expect(TAU_MAX).toBe(1);
    expect(TAU_STEP).toBe(0.1);
  });

  it("lists exactly the five variants", () => {
    expect(ALL_VARIANTS).toEqual([
      "latest",
      "historical",
      "enriched",
      "confidence_aware",
      "filtered",
    ]);
  });

  it("selecting a variant issues exactly one graph fetch", async () => {
    const { api } = countingClient();
    const store = new WorkbenchStore(api);
    await store.selectSubject("p-1");
    const before = store.fetchCount;
    await store.selectVariant("historical");
    expect(store.fetchCount).toBe(before + 1);
  });

  it("slider change on the filtered view triggers exactly one refetch", async () => {
    const { api, urls } = countingClient();
    const store = new WorkbenchStore(api);
    await store.selectSubject("p-1");
    await store.selectVariant("filtered");
    const before = store.fetchCount;
    await store.setTau(0.5);
    expect(store.fetchCount).toBe(before + 1);
    expect(urls.at(-1)).toContain("variant=filtered");
    expect(urls.at(-1)).toContain("tau=0.5");
  });

  it("slider change on unfiltered views does not refetch", async () => {
    const { api } = countingClient();
    const store = new WorkbenchStore(api);
    await store.selectSubject("p-1");
    const before = store.fetchCount;
    await store.setTau(0.3);
    expect(store.fetchCount).toBe(before);
    expect(store.state.tau).toBeCloseTo(0.3);
  });

  it("a successful ingest refetches the current view once", async () => {
    const { api } = countingClient();
    const store = new WorkbenchStore(api);
    await store.selectSubject("p-1");
    const before = store.fetchCount;
    await store.recordIngested();
    expect(store.fetchCount).toBe(before + 1);
  });

  it("never fetches without a selected subject", async () => {
    const { api } = countingClient();
    const store = new WorkbenchStore(api);
    await store.setTau(0.9);
    await store.selectVariant("filtered");
    expect(store.fetchCount).toBe(0);
  });

  it("compare posts the drafted question with tau and top_k", async () => {
    const bodies: unknown[] = [];
    const fetchImpl = async (input: string, init?: RequestInit) => {
      if (input === "/qa") {
        bodies.push(JSON.parse(String(init?.body)));
        return new Response(
          JSON.stringify({
            baseline: { request: {}, evidence: [], answer: "", generator_id: "d" },
            confidence_aware: { request: {}, evidence: [], answer: "", generator_id: "d" },
            evidence_diff: { baseline_only: [], confidence_only: [] },
          }),
          { status: 200 },
        );
      }
      return new Response(JSON.stringify(allRolesGraph()), { status: 200 });
    };
    const store = new WorkbenchStore(new ApiClient("", fetchImpl));
    await store.selectSubject("p-1");
    store.setQuestion("aspirin?");
    store.setTopK(7);
    await store.runCompare();
    expect(bodies[0]).toMatchObject({
      subject_id: "p-1",
      question: "aspirin?",
      top_k: 7,
      compare: true,
    });
    expect(store.state.lastCompare).not.toBeNull();
  });
});
