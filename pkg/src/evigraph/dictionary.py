"""Concept dictionary: surface-form normalization, lookup, and gazetteer matching.

The dictionary is the canonical namespace: synonyms and surface variants
collapse to one concept id. It is immutable after load and shared read-only.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .model import Entity, EntityType, parse_visit_node


def normalize_surface(text: str) -> str:
    """Lowercase, trim, and collapse internal whitespace."""
    return " ".join(text.lower().split())


@dataclass(frozen=True)
class Unmapped:
    """A mention with no dictionary entry; carries the normalized form."""

    mention: str


class ConceptDictionary:
    """Exact lookup over normalized surface forms.

    One surface form maps to at most one concept; one concept may own many
    surface forms. The first surface form registered for a concept is its
    preferred label.
    """

    def __init__(self, raw_entries: dict[str, dict]):
        self._by_surface: dict[str, tuple[str, EntityType]] = {}
        self._entities: dict[str, Entity] = {}
        surfaces_by_concept: dict[str, list[str]] = {}
        meta_by_concept: dict[str, tuple[EntityType, str | None]] = {}
        for surface, info in raw_entries.items():
            norm = normalize_surface(surface)
            if not norm:
                raise ValidationError("dictionary surface form normalizes to empty string")
            concept_id = info["concept_id"]
            entity_type = EntityType(info["entity_type"])
            vocab = info.get("vocab")
            if norm in self._by_surface and self._by_surface[norm][0] != concept_id:
                raise ValidationError(
                    f"surface form {norm!r} maps to both "
                    f"{self._by_surface[norm][0]!r} and {concept_id!r}"
                )
            prior = meta_by_concept.get(concept_id)
            if prior is not None and prior[0] is not entity_type:
                raise ValidationError(
                    f"concept {concept_id!r} declared with conflicting entity types"
                )
            self._by_surface[norm] = (concept_id, entity_type)
            meta_by_concept.setdefault(concept_id, (entity_type, vocab))
            forms = surfaces_by_concept.setdefault(concept_id, [])
            if norm not in forms:
                forms.append(norm)
        for concept_id, forms in surfaces_by_concept.items():
            entity_type, vocab = meta_by_concept[concept_id]
            self._entities[concept_id] = Entity(
                concept_id=concept_id,
                surface_forms=tuple(forms),
                entity_type=entity_type,
                source_vocabulary=vocab,
            )
        # Longest-first so multiword forms win over their substrings.
        pattern_forms = sorted(self._by_surface, key=lambda s: (-len(s), s))
        self._gazetteer = (
            re.compile(r"\b(?:" + "|".join(re.escape(f) for f in pattern_forms) + r")\b")
            if pattern_forms
            else None
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ConceptDictionary":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def __len__(self) -> int:
        return len(self._entities)

    def canonicalize(self, mention: str) -> tuple[str, EntityType] | Unmapped:
        """Resolve a mention; Unmapped is a value, not an error."""
        norm = normalize_surface(mention)
        hit = self._by_surface.get(norm)
        if hit is None:
            return Unmapped(norm)
        return hit

    def entity(self, concept_id: str) -> Entity | None:
        return self._entities.get(concept_id)

    def concept_ids(self) -> frozenset[str]:
        return frozenset(self._entities)

    def find_in_text(self, text: str) -> list[tuple[str, EntityType]]:
        """Gazetteer pass: dictionary concepts mentioned in free text.

        Deterministic: matches are reported in order of first occurrence in
        the normalized text, one entry per concept.
        """
        if self._gazetteer is None or not text:
            return []
        norm = normalize_surface(text)
        seen: set[str] = set()
        out: list[tuple[str, EntityType]] = []
        for match in self._gazetteer.finditer(norm):
            concept_id, entity_type = self._by_surface[match.group(0)]
            if concept_id not in seen:
                seen.add(concept_id)
                out.append((concept_id, entity_type))
        return out


class EntityCatalog:
    """Resolves node ids to entities, including synthesized subject/visit nodes."""

    def __init__(self, dictionary: ConceptDictionary):
        self.dictionary = dictionary

    def resolve(self, node_id: str, subject_id: str) -> Entity | None:
        if node_id == subject_id:
            return Entity(node_id, (subject_id,), EntityType.SUBJECT)
        visit = parse_visit_node(node_id, subject_id)
        if visit is not None:
            return Entity(node_id, (f"visit {visit}",), EntityType.VISIT)
        return self.dictionary.entity(node_id)

    def is_canonical(self, node_id: str, subject_id: str) -> bool:
        return self.resolve(node_id, subject_id) is not None

    def label(self, node_id: str, subject_id: str) -> str:
        entity = self.resolve(node_id, subject_id)
        return entity.label if entity else node_id
