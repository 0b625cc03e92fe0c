"""HTTP adapter for chat-completions-style LLM endpoints.

The scorer contract is strict: the model must answer with a single JSON
object {"score": number in [0, 1], "rationale": string}. Anything else is a
parse failure; after the configured retries the deterministic scorer takes
over, so scoring never aborts a pipeline commit.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import requests

from .model import ScoredTriple, Triple
from .scoring import HeuristicScorer, ScoringContext

log = logging.getLogger(__name__)

ENV_BASE_URL = "EVIGRAPH_LLM_BASE_URL"
ENV_MODEL = "EVIGRAPH_LLM_MODEL"
ENV_API_KEY = "EVIGRAPH_LLM_API_KEY"


@dataclass(frozen=True)
class LLMEndpoint:
    """Connection settings; resolved from the environment when omitted."""

    base_url: str
    model: str = "default"
    api_key: str | None = None
    timeout: float = 30.0
    max_inflight: int = 4

    @classmethod
    def from_env(cls, **overrides) -> "LLMEndpoint | None":
        base_url = overrides.pop("base_url", None) or os.environ.get(ENV_BASE_URL)
        if not base_url:
            return None
        return cls(
            base_url=base_url,
            model=overrides.pop("model", None) or os.environ.get(ENV_MODEL, "default"),
            api_key=overrides.pop("api_key", None) or os.environ.get(ENV_API_KEY),
            **overrides,
        )


class LLMClient:
    """Minimal chat-completions client with bounded in-flight requests."""

    def __init__(self, endpoint: LLMEndpoint):
        self.endpoint = endpoint
        self._inflight = threading.Semaphore(endpoint.max_inflight)
        self._session = requests.Session()

    def chat(self, messages: list[dict], temperature: float = 0.0) -> str:
        headers = {"Content-Type": "application/json"}
        if self.endpoint.api_key:
            headers["Authorization"] = f"Bearer {self.endpoint.api_key}"
        payload = {
            "model": self.endpoint.model,
            "messages": messages,
            "temperature": temperature,
        }
        url = self.endpoint.base_url.rstrip("/") + "/chat/completions"
        with self._inflight:
            response = self._session.post(url, json=payload, headers=headers, timeout=self.endpoint.timeout)
        response.raise_for_status()
        body = response.json()
        return body["choices"][0]["message"]["content"]


def load_prompt(name: str, prompts_dir: str | Path | None = None) -> str:
    """Prompt templates are editable text files; bundled defaults ship in the package."""
    if prompts_dir is not None:
        candidate = Path(prompts_dir) / name
        if candidate.exists():
            return candidate.read_text(encoding="utf-8")
    return (resources.files("evigraph") / "fixtures" / "prompts" / name).read_text(encoding="utf-8")


def serialize_context_block(target: Triple, ctx: ScoringContext) -> str:
    lines = [f"target: ({target.head}, {target.relation}, {target.tail})"]
    lines.append(f"evidence_count: {len(target.evidence)}")
    if ctx.current_triples:
        lines.append("current:")
        lines.extend(f"  ({t.head}, {t.relation}, {t.tail})" for t in ctx.current_triples)
    if ctx.past_triples:
        lines.append("past:")
        lines.extend(
            f"  ({t.head}, {t.relation}, {t.tail}) first_seen={t.first_seen}"
            for t in ctx.past_triples
        )
    if len(ctx) == 0:
        lines.append("context: (empty)")
    return "\n".join(lines)


def _parse_score_payload(content: str) -> tuple[float, str]:
    obj = json.loads(content)
    if not isinstance(obj, dict) or "score" not in obj:
        raise ValueError("response JSON must be an object with a 'score' field")
    raw = obj["score"]
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValueError("'score' must be a number")
    score = float(raw)
    rationale = obj.get("rationale", "")
    if not isinstance(rationale, str):
        raise ValueError("'rationale' must be a string")
    return score, rationale


class LLMScorer:
    """Scores triples through the endpoint, clamping and falling back safely."""

    generator_id = "llm"

    def __init__(
        self,
        client: LLMClient,
        fallback: HeuristicScorer,
        prompts_dir: str | Path | None = None,
    ):
        self.client = client
        self.fallback = fallback
        self.cfg = fallback.cfg
        self.template = load_prompt("triple_score.txt", prompts_dir)

    def score(self, target: Triple, ctx: ScoringContext, now: int) -> ScoredTriple:
        return score_llm(target, ctx, self.client, self.fallback, now, self.template)


def score_llm(
    target: Triple,
    ctx: ScoringContext,
    client: LLMClient,
    fallback: HeuristicScorer,
    now: int,
    template: str | None = None,
) -> ScoredTriple:
    """One strict-JSON scoring call with retries, then heuristic fallback."""
    template = template or load_prompt("triple_score.txt")
    prompt = template.format(context_block=serialize_context_block(target, ctx))
    attempts = 1 + fallback.cfg.retries
    for attempt in range(attempts):
        try:
            content = client.chat([{"role": "user", "content": prompt}])
            score, rationale = _parse_score_payload(content)
        except (requests.RequestException, ValueError, json.JSONDecodeError, KeyError) as exc:
            log.warning(
                "llm scoring attempt %d/%d failed for %s: %s",
                attempt + 1,
                attempts,
                target.key,
                exc,
            )
            continue
        if not 0.0 <= score <= 1.0:
            log.warning("llm score %s for %s outside [0, 1]; clamped", score, target.key)
            score = min(1.0, max(0.0, score))
        # Reuse the heuristic's support/conflict bookkeeping for provenance.
        shadow = fallback.score(target, ctx, now)
        return ScoredTriple(
            triple=target,
            confidence=score,
            rationale=rationale or shadow.rationale,
            supporting=shadow.supporting,
            conflicting=shadow.conflicting,
        )
    fallen = fallback.score(target, ctx, now)
    return ScoredTriple(
        triple=fallen.triple,
        confidence=fallen.confidence,
        rationale=fallen.rationale + "; fallback:heuristic",
        supporting=fallen.supporting,
        conflicting=fallen.conflicting,
    )


class LLMAnswerGenerator:
    """Generates QA answers via the endpoint; failures surface to the caller."""

    generator_id = "llm"

    def __init__(self, client: LLMClient, prompts_dir: str | Path | None = None):
        self.client = client
        self.template = load_prompt("answer.txt", prompts_dir)

    def generate(self, question: str, evidence_block: str) -> str:
        prompt = self.template.format(question=question, evidence_block=evidence_block)
        return self.client.chat([{"role": "user", "content": prompt}])


class LLMRiskGenerator:
    """Asks the endpoint for an outcome probability as strict JSON {"risk": x}."""

    generator_id = "llm"

    def __init__(self, client: LLMClient, prompts_dir: str | Path | None = None):
        self.client = client
        self.template = load_prompt("risk.txt", prompts_dir)

    def predict(self, subject_id: str, evidence_block: str) -> float:
        prompt = self.template.format(subject_id=subject_id, evidence_block=evidence_block)
        content = self.client.chat([{"role": "user", "content": prompt}])
        obj = json.loads(content)
        if not isinstance(obj, dict) or "risk" not in obj:
            raise ValueError("response JSON must be an object with a 'risk' field")
        raw = obj["risk"]
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ValueError("'risk' must be a number")
        return min(1.0, max(0.0, float(raw)))
