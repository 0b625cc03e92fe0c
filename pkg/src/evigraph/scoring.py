"""Confidence estimation: scoring contexts, the deterministic scorer, and the
score-bearing graph variants.

Every triple receives a confidence s in [0, 1] blending four signals:

  s = clamp(w_src * q_src + w_rep * rep + w_cooc * cooc + w_temp * temp)

  q_src  source-quality prior of the triple's best evidence source
  rep    min(n_obs, rep_cap) / rep_cap, where n_obs counts the triple's
         evidence records plus re-observations of the same assertion
         (same relation and tail, different head) in its context
  cooc   Laplace-smoothed support ratio (n_support + 1) / (n_support + n_conflict + 2);
         an empty context is uninformative (0.5), never extreme
  temp   exp(-lambda * (now - last_seen)), recency of the latest evidence

Conflicts are table-driven: a context triple on the same (head, tail) whose
relation is configured as mutually exclusive with the target's.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import ValidationError
from .model import (
    STATIC_EVIDENCE_PREFIX,
    GraphVariant,
    ScoredTriple,
    Triple,
    VariantKind,
)


class EvidenceSource(enum.Enum):
    STRUCTURED = "structured"
    FREE_TEXT = "free_text"
    STATIC = "static"


@dataclass(frozen=True)
class EvidenceInfo:
    visit_index: int
    source: EvidenceSource


#: Resolves a record id to when and from what kind of source it was observed.
EvidenceResolver = Callable[[str], "EvidenceInfo | None"]

#: Relation pairs that cannot both hold on the same (head, tail).
DEFAULT_EXCLUSIVE_PAIRS = (
    ("diagnosed_with", "prescribed"),
    ("diagnosed_with", "underwent"),
    ("underwent", "prescribed"),
)

DEFAULT_SOURCE_PRIORS = {
    EvidenceSource.STRUCTURED: 0.8,
    EvidenceSource.FREE_TEXT: 0.5,
    EvidenceSource.STATIC: 0.9,
}


@dataclass(frozen=True)
class ScorerConfig:
    """Weights and priors for the deterministic scorer. Weights sum to 1."""

    weights: tuple[float, float, float, float] = (0.25, 0.35, 0.20, 0.20)
    source_priors: Mapping[EvidenceSource, float] = field(
        default_factory=lambda: dict(DEFAULT_SOURCE_PRIORS)
    )
    recency_lambda: float = 0.1
    rep_cap: int = 5
    max_context: int = 32
    default_on_failure: float = 0.5
    retries: int = 2
    exclusive_pairs: tuple[tuple[str, str], ...] = DEFAULT_EXCLUSIVE_PAIRS

    def __post_init__(self):
        if len(self.weights) != 4:
            raise ValidationError("exactly four signal weights are required")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValidationError(f"signal weights must sum to 1, got {sum(self.weights)}")
        if any(w < 0 for w in self.weights):
            raise ValidationError("signal weights must be non-negative")
        for source, prior in self.source_priors.items():
            if not 0.0 <= prior <= 1.0:
                raise ValidationError(f"source prior for {source} outside [0, 1]")
        if self.recency_lambda <= 0:
            raise ValidationError("recency_lambda must be > 0")
        if self.rep_cap < 1:
            raise ValidationError("rep_cap must be >= 1")
        if not 0.0 <= self.default_on_failure <= 1.0:
            raise ValidationError("default_on_failure outside [0, 1]")

    def exclusive(self, rel_a: str, rel_b: str) -> bool:
        if rel_a == rel_b:
            return False
        pair = {rel_a, rel_b}
        return any(set(p) == pair for p in self.exclusive_pairs)


@dataclass(frozen=True)
class FilterThreshold:
    tau: float

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValidationError(f"tau {self.tau} outside [0, 1]")


@dataclass(frozen=True)
class ScoringContext:
    """Current- and past-visit triples relevant to one target triple."""

    target: Triple
    current_triples: tuple[Triple, ...] = ()
    past_triples: tuple[Triple, ...] = ()
    max_size: int = 32

    def __post_init__(self):
        if len(self.current_triples) + len(self.past_triples) > self.max_size:
            raise ValidationError("scoring context exceeds max_size")

    @property
    def triples(self) -> tuple[Triple, ...]:
        return self.current_triples + self.past_triples

    def __len__(self) -> int:
        return len(self.current_triples) + len(self.past_triples)


def build_context(
    target: Triple,
    historical: GraphVariant,
    max_size: int = 32,
    now: int | None = None,
) -> ScoringContext:
    """Collect 1-hop neighbors of the target, current commit first.

    Past triples are ordered by descending first_seen; ties and the
    current-commit block fall back to lexicographic key order.
    """
    if now is None:
        now = max((t.first_seen for t in historical.base_triples()), default=0)
    endpoints = {target.head, target.tail}
    current: list[Triple] = []
    past: list[Triple] = []
    for t in historical.base_triples():
        if t.key_tuple == target.key_tuple:
            continue
        if t.head in endpoints or t.tail in endpoints:
            (current if t.first_seen >= now else past).append(t)
    current.sort(key=lambda t: t.key_tuple)
    past.sort(key=lambda t: (-t.first_seen, t.key_tuple))
    kept = (current + past)[:max_size]
    split = min(len(current), len(kept))
    return ScoringContext(
        target=target,
        current_triples=tuple(kept[:split]),
        past_triples=tuple(kept[split:]),
        max_size=max_size,
    )


def _resolve_evidence(
    triple: Triple, resolver: EvidenceResolver | None
) -> list[EvidenceInfo]:
    infos = []
    for evidence_id in triple.evidence:
        if evidence_id.startswith(STATIC_EVIDENCE_PREFIX):
            infos.append(EvidenceInfo(triple.first_seen, EvidenceSource.STATIC))
            continue
        info = resolver(evidence_id) if resolver else None
        if info is None:
            # Unknown record ids (e.g. directly constructed triples): assume a
            # structured observation at the triple's first appearance.
            info = EvidenceInfo(triple.first_seen, EvidenceSource.STRUCTURED)
        infos.append(info)
    return infos


def score_heuristic(
    target: Triple,
    ctx: ScoringContext,
    cfg: ScorerConfig,
    now: int,
    evidence_resolver: EvidenceResolver | None = None,
) -> ScoredTriple:
    """Deterministic realization of the four-signal confidence score.

    Total function: any triple/context/config yields a score in [0, 1].
    """
    w_src, w_rep, w_cooc, w_temp = cfg.weights
    infos = _resolve_evidence(target, evidence_resolver)

    structured_prior = cfg.source_priors.get(EvidenceSource.STRUCTURED, 0.8)
    q_src = max((cfg.source_priors.get(i.source, 0.5) for i in infos), default=structured_prior)

    supporting: list[str] = []
    conflicting: list[str] = []
    repeats = 0
    for t in ctx.triples:
        if (
            t.head == target.head
            and t.tail == target.tail
            and cfg.exclusive(t.relation, target.relation)
        ):
            conflicting.append(t.key)
        else:
            supporting.append(t.key)
            if t.relation == target.relation and t.tail == target.tail and t.head != target.head:
                repeats += 1

    n_obs = len(target.evidence) + repeats
    rep = min(n_obs, cfg.rep_cap) / cfg.rep_cap

    n_support = len(supporting)
    n_conflict = len(conflicting)
    cooc = (n_support + 1) / (n_support + n_conflict + 2)

    last_seen = max((i.visit_index for i in infos), default=target.first_seen)
    dt = max(0, now - last_seen)
    temp = math.exp(-cfg.recency_lambda * dt)

    score = w_src * q_src + w_rep * rep + w_cooc * cooc + w_temp * temp
    score = min(1.0, max(0.0, score))
    rationale = (
        f"source={q_src:.2f}; repetition={rep:.2f} (n_obs={n_obs}); "
        f"cooccurrence={cooc:.2f} (support={n_support}, conflict={n_conflict}); "
        f"recency={temp:.2f} (dt={dt})"
    )
    return ScoredTriple(
        triple=target,
        confidence=score,
        rationale=rationale,
        supporting=tuple(supporting),
        conflicting=tuple(conflicting),
    )


class HeuristicScorer:
    """Callable scorer bundling config and evidence resolution."""

    generator_id = "heuristic"

    def __init__(self, cfg: ScorerConfig | None = None, evidence_resolver: EvidenceResolver | None = None):
        self.cfg = cfg or ScorerConfig()
        self.evidence_resolver = evidence_resolver

    def score(self, target: Triple, ctx: ScoringContext, now: int) -> ScoredTriple:
        return score_heuristic(target, ctx, self.cfg, now, self.evidence_resolver)


def materialize_confidence(
    enriched: GraphVariant,
    scorer,
    context_source: GraphVariant | None = None,
    now: int | None = None,
) -> GraphVariant:
    """Score every triple exactly once; the key set is preserved.

    Contexts are built from `context_source` (normally the historical
    variant) so supporting/conflicting keys resolve within the subject graph.
    """
    if enriched.variant_kind not in (VariantKind.ENRICHED, VariantKind.HISTORICAL):
        raise ValidationError("materialize_confidence expects an enriched (or historical) variant")
    source = context_source if context_source is not None else enriched
    if now is None:
        now = max((t.first_seen for t in source.base_triples()), default=0)
    scored = []
    for target in enriched.triples:  # already key-sorted: deterministic order
        ctx = build_context(target, source, scorer.cfg.max_context, now)
        scored.append(scorer.score(target, ctx, now))
    return GraphVariant(
        subject_id=enriched.subject_id,
        variant_kind=VariantKind.CONFIDENCE_AWARE,
        version=enriched.version,
        triples=tuple(scored),
    )


def filter_variant(scored: GraphVariant, tau: float | FilterThreshold) -> GraphVariant:
    """Keep exactly the triples with confidence >= tau (boundary inclusive)."""
    if scored.variant_kind is not VariantKind.CONFIDENCE_AWARE:
        raise ValidationError("filter_variant expects a confidence-aware variant")
    threshold = tau.tau if isinstance(tau, FilterThreshold) else FilterThreshold(float(tau)).tau
    kept = tuple(t for t in scored.triples if t.confidence >= threshold)
    return GraphVariant(
        subject_id=scored.subject_id,
        variant_kind=VariantKind.FILTERED,
        version=scored.version,
        triples=kept,
        tau=threshold,
    )
