"""Core graph types: entities, triples, confidence-scored triples, graph variants.

All types are frozen; committed snapshots are shared between threads without
copying and never mutate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

from .errors import ValidationError


class EntityType(enum.Enum):
    SUBJECT = "Subject"
    VISIT = "Visit"
    DISEASE = "Disease"
    PROCEDURE = "Procedure"
    MEDICATION = "Medication"
    CONCEPT = "Concept"


#: Node color used by graph exports and the UI, keyed by entity type.
COLOR_ROLES = {
    EntityType.SUBJECT: "red",
    EntityType.VISIT: "white",
    EntityType.DISEASE: "brown",
    EntityType.PROCEDURE: "green",
    EntityType.MEDICATION: "pink",
    EntityType.CONCEPT: "gray",
}

#: Relations emitted when a subject record is turned into triples.
RECORD_RELATIONS = ("has_visit", "diagnosed_with", "underwent", "prescribed", "mentioned")
#: Relations allowed in the static background knowledge file.
STATIC_RELATIONS = ("synonym_of", "is_a", "interacts_with", "treats")

DEFAULT_RELATION_VOCABULARY = frozenset(RECORD_RELATIONS + STATIC_RELATIONS)

#: Evidence ids with this prefix denote curated background knowledge, not records.
STATIC_EVIDENCE_PREFIX = "static:"


def visit_node_id(subject_id: str, visit_index: int) -> str:
    return f"{subject_id}:visit:{visit_index}"


def parse_visit_node(node_id: str, subject_id: str) -> int | None:
    """Return the visit index if node_id is a visit node of this subject."""
    prefix = f"{subject_id}:visit:"
    if node_id.startswith(prefix):
        rest = node_id[len(prefix):]
        if rest.isdigit():
            return int(rest)
    return None


@dataclass(frozen=True)
class Entity:
    """A canonical concept with its known surface forms."""

    concept_id: str
    surface_forms: tuple[str, ...]
    entity_type: EntityType
    source_vocabulary: str | None = None

    def __post_init__(self):
        if not self.concept_id:
            raise ValidationError("entity concept_id must be non-empty")

    @property
    def label(self) -> str:
        """Preferred surface form (first registered), falling back to the id."""
        return self.surface_forms[0] if self.surface_forms else self.concept_id


@dataclass(frozen=True)
class Triple:
    """An assertion (head, relation, tail) with provenance.

    (head, relation, tail) is the identity key; evidence and first_seen are
    bookkeeping and never distinguish two triples.
    """

    head: str
    relation: str
    tail: str
    first_seen: int = 0
    evidence: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.head or not self.tail:
            raise ValidationError("triple head and tail must be non-empty")
        if not self.relation:
            raise ValidationError("triple relation must be non-empty")
        if self.first_seen < 0:
            raise ValidationError("first_seen must be >= 0")
        if not isinstance(self.evidence, tuple):
            object.__setattr__(self, "evidence", tuple(self.evidence))

    @property
    def key(self) -> str:
        return f"{self.head}|{self.relation}|{self.tail}"

    @property
    def key_tuple(self) -> tuple[str, str, str]:
        return (self.head, self.relation, self.tail)

    def with_evidence(self, evidence: tuple[str, ...], first_seen: int) -> "Triple":
        return Triple(self.head, self.relation, self.tail, first_seen, evidence)


@dataclass(frozen=True)
class ScoredTriple:
    """A triple annotated with a confidence score and its justification."""

    triple: Triple
    confidence: float
    rationale: str = ""
    supporting: tuple[str, ...] = ()
    conflicting: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence {self.confidence} outside [0, 1]")
        if set(self.supporting) & set(self.conflicting):
            raise ValidationError("supporting and conflicting triple keys overlap")

    @property
    def key(self) -> str:
        return self.triple.key


class VariantKind(enum.Enum):
    LATEST = "latest"
    HISTORICAL = "historical"
    ENRICHED = "enriched"
    CONFIDENCE_AWARE = "confidence_aware"
    FILTERED = "filtered"

    @classmethod
    def parse(cls, value: "str | VariantKind") -> "VariantKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValidationError(f"unknown variant kind {value!r}") from None


#: Variants whose triples carry confidence scores.
SCORE_BEARING = frozenset({VariantKind.CONFIDENCE_AWARE, VariantKind.FILTERED})


@dataclass(frozen=True)
class GraphVariant:
    """One materialization of a subject's graph at a committed version.

    Triples are stored sorted by identity key so that serialization is
    deterministic. Instances are immutable snapshots.
    """

    subject_id: str
    variant_kind: VariantKind
    version: int
    triples: tuple = ()
    tau: float | None = None

    def __post_init__(self):
        scored = self.variant_kind in SCORE_BEARING
        for t in self.triples:
            if scored and not isinstance(t, ScoredTriple):
                raise ValidationError(f"{self.variant_kind.value} variant requires scored triples")
            if not scored and not isinstance(t, Triple):
                raise ValidationError(f"{self.variant_kind.value} variant requires unscored triples")
        if (self.tau is not None) != (self.variant_kind is VariantKind.FILTERED):
            raise ValidationError("tau is present iff the variant is filtered")
        if self.tau is not None and not 0.0 <= self.tau <= 1.0:
            raise ValidationError(f"tau {self.tau} outside [0, 1]")
        ordered = tuple(sorted(self.triples, key=_variant_sort_key))
        object.__setattr__(self, "triples", ordered)
        keys = [t.key for t in ordered]
        if len(keys) != len(set(keys)):
            raise ValidationError("duplicate triple keys within one variant")

    @cached_property
    def by_key(self) -> dict:
        return {t.key: t for t in self.triples}

    def keys(self) -> frozenset[str]:
        return frozenset(self.by_key)

    def base_triples(self) -> tuple[Triple, ...]:
        """The unscored triples, unwrapping ScoredTriple where needed."""
        return tuple(t.triple if isinstance(t, ScoredTriple) else t for t in self.triples)

    def entity_ids(self) -> frozenset[str]:
        ids = set()
        for t in self.base_triples():
            ids.add(t.head)
            ids.add(t.tail)
        return frozenset(ids)

    def __len__(self) -> int:
        return len(self.triples)


def _variant_sort_key(item) -> tuple[str, str, str]:
    t = item.triple if isinstance(item, ScoredTriple) else item
    return t.key_tuple


def empty_variant(subject_id: str, kind: VariantKind, version: int = 0) -> GraphVariant:
    return GraphVariant(subject_id=subject_id, variant_kind=kind, version=version)


# --- JSON (de)serialization used by the subject log and the HTTP layer ---

def triple_to_json(t: Triple) -> dict:
    return {
        "head": t.head,
        "relation": t.relation,
        "tail": t.tail,
        "first_seen": t.first_seen,
        "evidence": list(t.evidence),
    }


def triple_from_json(obj: dict) -> Triple:
    return Triple(
        head=obj["head"],
        relation=obj["relation"],
        tail=obj["tail"],
        first_seen=int(obj["first_seen"]),
        evidence=tuple(obj["evidence"]),
    )


def scored_to_json(s: ScoredTriple) -> dict:
    out = triple_to_json(s.triple)
    out.update(
        {
            "confidence": s.confidence,
            "rationale": s.rationale,
            "supporting": list(s.supporting),
            "conflicting": list(s.conflicting),
        }
    )
    return out


def scored_from_json(obj: dict) -> ScoredTriple:
    return ScoredTriple(
        triple=triple_from_json(obj),
        confidence=float(obj["confidence"]),
        rationale=obj.get("rationale", ""),
        supporting=tuple(obj.get("supporting", ())),
        conflicting=tuple(obj.get("conflicting", ())),
    )
