"""Curated static background knowledge and graph enrichment."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .model import (
    STATIC_EVIDENCE_PREFIX,
    STATIC_RELATIONS,
    GraphVariant,
    Triple,
    VariantKind,
)


@dataclass(frozen=True)
class StaticKG:
    """Immutable background edges shared read-only across subjects.

    synonym_of is stored symmetrically; is_a is acyclic over the loaded set.
    """

    edges: frozenset[tuple[str, str, str]]
    provenance: str

    def __len__(self) -> int:
        return len(self.edges)


def empty_static_kg(provenance: str = "none") -> StaticKG:
    return StaticKG(frozenset(), provenance)


def _check_is_a_acyclic(edges: frozenset[tuple[str, str, str]]) -> None:
    adjacency: dict[str, list[str]] = {}
    for head, relation, tail in edges:
        if relation == "is_a":
            adjacency.setdefault(head, []).append(tail)
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(node: str, stack: list[str]) -> None:
        state[node] = 0
        stack.append(node)
        for nxt in adjacency.get(node, ()):
            if state.get(nxt) == 0:
                raise ValidationError(f"is_a cycle detected involving {nxt!r}")
            if nxt not in state:
                visit(nxt, stack)
        stack.pop()
        state[node] = 1

    for start in sorted(adjacency):
        if start not in state:
            visit(start, [])


def build_static_kg(
    raw_edges: list[tuple[str, str, str]], provenance: str
) -> StaticKG:
    """Validate relations, apply synonym symmetry closure, reject is_a cycles."""
    edges: set[tuple[str, str, str]] = set()
    for head, relation, tail in raw_edges:
        if relation not in STATIC_RELATIONS:
            raise ValidationError(f"unknown static relation {relation!r}")
        if not head or not tail:
            raise ValidationError("static edge endpoints must be non-empty")
        edges.add((head, relation, tail))
        if relation == "synonym_of":
            edges.add((tail, relation, head))
    frozen = frozenset(edges)
    _check_is_a_acyclic(frozen)
    return StaticKG(frozen, provenance)


def load_static_kg(path: str | Path, provenance: str | None = None) -> StaticKG:
    """Load JSON Lines of {"head", "relation", "tail"}."""
    path = Path(path)
    raw: list[tuple[str, str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON ({exc})") from None
            try:
                raw.append((obj["head"], obj["relation"], obj["tail"]))
            except KeyError as exc:
                raise ValidationError(
                    f"{path}:{lineno}: missing field {exc.args[0]!r}"
                ) from None
    return build_static_kg(raw, provenance or path.stem)


def enrich(historical: GraphVariant, static_kg: StaticKG, now: int | None = None) -> GraphVariant:
    """Link background edges whose both endpoints already exist in Historical.

    Subject-private triples are never modified; static-origin triples carry a
    provenance evidence id and first_seen at the current visit index.
    """
    if historical.variant_kind is not VariantKind.HISTORICAL:
        raise ValidationError("enrich expects a historical variant")
    if now is None:
        now = max((t.first_seen for t in historical.triples), default=0)
    present = historical.entity_ids()
    existing = historical.keys()
    added: list[Triple] = []
    for head, relation, tail in sorted(static_kg.edges):
        if head in present and tail in present:
            candidate = Triple(
                head,
                relation,
                tail,
                first_seen=now,
                evidence=(STATIC_EVIDENCE_PREFIX + static_kg.provenance,),
            )
            if candidate.key not in existing:
                added.append(candidate)
    return GraphVariant(
        subject_id=historical.subject_id,
        variant_kind=VariantKind.ENRICHED,
        version=historical.version,
        triples=historical.triples + tuple(added),
    )
