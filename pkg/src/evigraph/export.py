"""Graph exports: stable JSON views of variant snapshots for the API and UI."""

from __future__ import annotations

import urllib.parse

from .errors import EvigraphError
from .model import (
    COLOR_ROLES,
    GraphVariant,
    ScoredTriple,
    VariantKind,
)

SCHEMA_VERSION = 1


def encode_edge_key(key: str) -> str:
    """URL-safe, human-debuggable encoding of "head|relation|tail"."""
    return urllib.parse.quote(key, safe="")


def decode_edge_key(encoded: str) -> str:
    return urllib.parse.unquote(encoded)


class UnknownEdgeError(EvigraphError):
    pass


def export_graph(variant: GraphVariant, catalog) -> dict:
    """Deterministic export: nodes sorted by id, edges by key.

    Two exports of the same (subject, variant, version, tau) are
    byte-comparable once serialized with sorted keys.
    """
    subject_id = variant.subject_id
    node_ids = set(variant.entity_ids())
    node_ids.add(subject_id)  # the subject node is present even when isolated
    nodes = []
    for node_id in sorted(node_ids):
        entity = catalog.resolve(node_id, subject_id)
        entity_type = entity.entity_type if entity else None
        nodes.append(
            {
                "id": node_id,
                "label": entity.label if entity else node_id,
                "entity_type": entity_type.value if entity_type else "Concept",
                "color_role": COLOR_ROLES[entity_type] if entity_type else "gray",
            }
        )
    edges = []
    for entry in variant.triples:
        scored = isinstance(entry, ScoredTriple)
        triple = entry.triple if scored else entry
        edge = {
            "key": encode_edge_key(triple.key),
            "source": triple.head,
            "relation": triple.relation,
            "target": triple.tail,
            "first_seen": triple.first_seen,
            "evidence": list(triple.evidence),
        }
        if scored:
            edge["confidence"] = entry.confidence
            edge["rationale"] = entry.rationale
            edge["supporting"] = [encode_edge_key(k) for k in entry.supporting]
            edge["conflicting"] = [encode_edge_key(k) for k in entry.conflicting]
        edges.append(edge)
    out = {
        "schema_version": SCHEMA_VERSION,
        "subject_id": subject_id,
        "variant_kind": variant.variant_kind.value,
        "version": variant.version,
        "nodes": nodes,
        "edges": edges,
    }
    if variant.tau is not None:
        out["tau"] = variant.tau
    return out


def edge_rationale(confidence_aware: GraphVariant, edge_key: str) -> dict:
    """Full provenance payload for one scored edge (hover panel)."""
    if confidence_aware.variant_kind is not VariantKind.CONFIDENCE_AWARE:
        raise EvigraphError("rationale lookups run against the confidence-aware variant")
    key = decode_edge_key(edge_key)
    entry = confidence_aware.by_key.get(key)
    if entry is None:
        raise UnknownEdgeError(f"unknown edge {key!r}")
    return {
        "schema_version": SCHEMA_VERSION,
        "key": encode_edge_key(key),
        "confidence": entry.confidence,
        "rationale": entry.rationale,
        "supporting": [encode_edge_key(k) for k in entry.supporting],
        "conflicting": [encode_edge_key(k) for k in entry.conflicting],
        "evidence": list(entry.triple.evidence),
    }
