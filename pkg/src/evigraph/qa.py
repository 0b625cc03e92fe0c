"""Question answering over graph variants: baseline and confidence-aware.

Retrieval is lexical: dictionary concepts found in the question anchor a
1-hop expansion over the selected variant. Baseline reads the full
historical graph regardless of confidence; confidence-aware reads the scored
graph, optionally thresholded, and always carries scores into the prompt.
"""

from __future__ import annotations

import datetime
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import requests

from .dictionary import ConceptDictionary, EntityCatalog
from .errors import AnswerGenerationError, ScenarioError, ValidationError
from .model import ScoredTriple, Triple, VariantKind, visit_node_id
from .records import SubjectRecord


class QAMode(enum.Enum):
    BASELINE = "baseline"
    CONFIDENCE_AWARE = "confidence_aware"

    @classmethod
    def parse(cls, value: "str | QAMode") -> "QAMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValidationError(f"unknown QA mode {value!r}") from None


@dataclass(frozen=True)
class QARequest:
    subject_id: str
    question: str
    mode: QAMode = QAMode.BASELINE
    tau: float | None = None
    top_k: int = 5
    include_scores_in_prompt: bool | None = None

    def __post_init__(self):
        if self.top_k < 1:
            raise ValidationError("top_k must be >= 1")
        if self.tau is not None:
            if self.mode is not QAMode.CONFIDENCE_AWARE:
                raise ValidationError("tau is only valid in confidence-aware mode")
            if not 0.0 <= self.tau <= 1.0:
                raise ValidationError(f"tau {self.tau} outside [0, 1]")
        # Score visibility is pinned by mode; reject contradictory requests.
        expected = self.mode is QAMode.CONFIDENCE_AWARE
        if self.include_scores_in_prompt is not None and self.include_scores_in_prompt != expected:
            raise ValidationError(
                f"include_scores_in_prompt={self.include_scores_in_prompt} contradicts mode "
                f"{self.mode.value}"
            )
        object.__setattr__(self, "include_scores_in_prompt", expected)

    def to_json(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "question": self.question,
            "mode": self.mode.value,
            "tau": self.tau,
            "top_k": self.top_k,
            "include_scores_in_prompt": self.include_scores_in_prompt,
        }


@dataclass(frozen=True)
class EvidenceItem:
    triple: Triple
    confidence: float | None = None

    @property
    def key(self) -> str:
        return self.triple.key

    def to_json(self) -> dict:
        out = {
            "head": self.triple.head,
            "relation": self.triple.relation,
            "tail": self.triple.tail,
            "first_seen": self.triple.first_seen,
            "evidence": list(self.triple.evidence),
        }
        if self.confidence is not None:
            out["confidence"] = self.confidence
        return out


@dataclass(frozen=True)
class QAExchange:
    request: QARequest
    evidence: tuple[EvidenceItem, ...]
    answer: str
    generator_id: str
    created_at: str

    def to_json(self) -> dict:
        return {
            "request": self.request.to_json(),
            "evidence": [e.to_json() for e in self.evidence],
            "answer": self.answer,
            "generator_id": self.generator_id,
            "created_at": self.created_at,
        }


@dataclass(frozen=True)
class ComparisonResult:
    baseline: QAExchange
    confidence_aware: QAExchange
    baseline_only: tuple[str, ...]
    confidence_only: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "baseline": self.baseline.to_json(),
            "confidence_aware": self.confidence_aware.to_json(),
            "evidence_diff": {
                "baseline_only": list(self.baseline_only),
                "confidence_only": list(self.confidence_only),
            },
        }


def retrieve(request: QARequest, store, dictionary: ConceptDictionary) -> list[EvidenceItem]:
    """Anchor on dictionary hits in the question, expand 1 hop, rank, truncate.

    Baseline ranks by recency then key; confidence-aware ranks by confidence,
    then recency, then key. With no anchor hits the most recent visit
    subgraph stands in.
    """
    if request.mode is QAMode.BASELINE:
        variant = store.get_variant(request.subject_id, VariantKind.HISTORICAL)
    elif request.tau is not None:
        variant = store.get_variant(request.subject_id, VariantKind.FILTERED, tau=request.tau)
    else:
        variant = store.get_variant(request.subject_id, VariantKind.CONFIDENCE_AWARE)

    anchors = {concept_id for concept_id, _ in dictionary.find_in_text(request.question)}
    items: list[EvidenceItem] = []
    for entry in variant.triples:
        scored = isinstance(entry, ScoredTriple)
        triple = entry.triple if scored else entry
        items.append(EvidenceItem(triple, entry.confidence if scored else None))

    if anchors:
        candidates = [i for i in items if i.triple.head in anchors or i.triple.tail in anchors]
    else:
        latest_visit = visit_node_id(request.subject_id, store.last_visit_index(request.subject_id))
        candidates = [
            i for i in items if latest_visit in (i.triple.head, i.triple.tail)
        ]

    if request.mode is QAMode.CONFIDENCE_AWARE:
        candidates.sort(
            key=lambda i: (-(i.confidence or 0.0), -i.triple.first_seen, i.triple.key_tuple)
        )
    else:
        candidates.sort(key=lambda i: (-i.triple.first_seen, i.triple.key_tuple))
    return candidates[: request.top_k]


class AnswerGenerator(Protocol):
    generator_id: str

    def generate(self, question: str, evidence_block: str) -> str:
        ...


class DeterministicAnswerGenerator:
    """Offline generator: enumerates the evidence grouped by relation."""

    generator_id = "deterministic"

    def generate(self, question: str, evidence_block: str) -> str:
        if not evidence_block:
            return "No supporting evidence found for this question."
        return f"Evidence for {question!r} -- {evidence_block}"


def format_evidence_block(
    evidence: list[EvidenceItem], catalog: EntityCatalog, subject_id: str, with_scores: bool
) -> str:
    """Stable textual rendering of evidence, grouped by relation.

    Confidences appear as two-decimal literals so prompts are stable.
    """
    by_relation: dict[str, list[str]] = {}
    for item in evidence:
        t = item.triple
        head = catalog.label(t.head, subject_id)
        tail = catalog.label(t.tail, subject_id)
        phrase = f"{tail} ({head})" if head != tail else tail
        if with_scores and item.confidence is not None:
            phrase += f" [confidence {item.confidence:.2f}]"
        by_relation.setdefault(t.relation, []).append(phrase)
    parts = [
        f"{relation}: " + ", ".join(phrases) for relation, phrases in sorted(by_relation.items())
    ]
    return "; ".join(parts)


def answer(
    request: QARequest,
    evidence: list[EvidenceItem],
    generator: AnswerGenerator,
    catalog: EntityCatalog,
) -> QAExchange:
    block = format_evidence_block(
        evidence, catalog, request.subject_id, with_scores=bool(request.include_scores_in_prompt)
    )
    try:
        text = generator.generate(request.question, block)
    except (requests.RequestException, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise AnswerGenerationError(f"answer generation failed: {exc}", evidence) from exc
    return QAExchange(
        request=request,
        evidence=tuple(evidence),
        answer=text,
        generator_id=generator.generator_id,
        created_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )


def compare(
    engine,
    subject_id: str,
    question: str,
    tau: float | None = None,
    top_k: int = 5,
) -> ComparisonResult:
    """Run both pipelines on one question; read-only over snapshots."""
    generator = engine.answer_generator()
    base_request = QARequest(subject_id, question, QAMode.BASELINE, top_k=top_k)
    conf_request = QARequest(subject_id, question, QAMode.CONFIDENCE_AWARE, tau=tau, top_k=top_k)
    base_evidence = retrieve(base_request, engine.store, engine.dictionary)
    conf_evidence = retrieve(conf_request, engine.store, engine.dictionary)
    base_exchange = answer(base_request, base_evidence, generator, engine.catalog)
    conf_exchange = answer(conf_request, conf_evidence, generator, engine.catalog)
    base_keys = {e.key for e in base_evidence}
    conf_keys = {e.key for e in conf_evidence}
    return ComparisonResult(
        baseline=base_exchange,
        confidence_aware=conf_exchange,
        baseline_only=tuple(sorted(base_keys - conf_keys)),
        confidence_only=tuple(sorted(conf_keys - base_keys)),
    )


@dataclass(frozen=True)
class WhatIfResult:
    name: str
    result: ComparisonResult

    def to_json(self) -> dict:
        return {"name": self.name, **self.result.to_json()}


def load_scenarios(source: str | Path | dict) -> list[dict]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            obj = json.load(fh)
    else:
        obj = source
    scenarios = obj.get("scenarios", obj if isinstance(obj, list) else None)
    if scenarios is None:
        raise ScenarioError("<file>", "expected a top-level 'scenarios' list")
    return scenarios


def run_whatif(engine, source: str | Path | dict) -> list[WhatIfResult]:
    """Replay scripted ingest-plus-question cases in a throwaway store."""
    results = []
    for obj in load_scenarios(source):
        name = obj.get("name", "<unnamed>")
        try:
            records = [SubjectRecord.from_json(r) for r in obj["records"]]
            question = obj["question"]
            tau = obj.get("tau")
            top_k = int(obj.get("top_k", 5))
        except (KeyError, TypeError, ValidationError) as exc:
            raise ScenarioError(name, str(exc)) from None
        sandbox = engine.spawn_ephemeral()
        try:
            for record in records:
                sandbox.ingest_record(record)
            subject_ids = {r.subject_id for r in records}
            subject = obj.get("subject_id", records[0].subject_id if records else None)
            if subject is None or subject not in subject_ids:
                raise ScenarioError(name, f"unknown subject reference {subject!r}")
            comparison = compare(sandbox, subject, question, tau=tau, top_k=top_k)
        except ScenarioError:
            raise
        except ValidationError as exc:
            raise ScenarioError(name, str(exc)) from None
        results.append(WhatIfResult(name, comparison))
    return results
