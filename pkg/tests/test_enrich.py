import json

import pytest

from evigraph.errors import ValidationError
from evigraph.model import GraphVariant, Triple, VariantKind, empty_variant
from evigraph.statickg import StaticKG, build_static_kg, empty_static_kg, enrich, load_static_kg


def historical(*triples, version=1):
    return GraphVariant("s1", VariantKind.HISTORICAL, version, tuple(triples))


def t(head, rel, tail, seen=0):
    return Triple(head, rel, tail, seen, ("r1",))


class TestLoad:
    def test_synonym_symmetry_closure(self, tmp_path):
        path = tmp_path / "kg.jsonl"
        path.write_text('{"head": "A", "relation": "synonym_of", "tail": "B"}\n')
        kg = load_static_kg(path)
        assert ("A", "synonym_of", "B") in kg.edges
        assert ("B", "synonym_of", "A") in kg.edges
        assert kg.provenance == "kg"

    def test_is_a_cycle_rejected_naming_member(self, tmp_path):
        path = tmp_path / "kg.jsonl"
        lines = [
            {"head": "A", "relation": "is_a", "tail": "B"},
            {"head": "B", "relation": "is_a", "tail": "A"},
        ]
        path.write_text("\n".join(json.dumps(l) for l in lines) + "\n")
        with pytest.raises(ValidationError, match="cycle.*'[AB]'"):
            load_static_kg(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "kg.jsonl"
        path.write_text("")
        assert len(load_static_kg(path)) == 0

    def test_unknown_relation_rejected(self):
        with pytest.raises(ValidationError, match="causes"):
            build_static_kg([("A", "causes", "B")], "test")


class TestEnrich:
    def test_edge_added_when_both_endpoints_present(self):
        kg = build_static_kg([("C_ASP", "interacts_with", "C_WARF")], "base")
        hist = historical(
            t("v0", "prescribed", "C_ASP"),
            t("v1", "prescribed", "C_WARF", seen=1),
        )
        enriched = enrich(hist, kg, now=1)
        assert "C_ASP|interacts_with|C_WARF" in enriched.keys()
        added = enriched.by_key["C_ASP|interacts_with|C_WARF"]
        assert added.evidence == ("static:base",)
        assert added.first_seen == 1

    def test_endpoint_gating(self):
        kg = build_static_kg([("C_ASP", "treats", "C_X")], "base")
        hist = historical(t("v0", "prescribed", "C_ASP"))
        enriched = enrich(hist, kg, now=0)
        assert "C_ASP|treats|C_X" not in enriched.keys()
        assert enriched.keys() == hist.keys()

    def test_empty_static_kg_is_identity(self):
        hist = historical(t("v0", "prescribed", "C_ASP"))
        enriched = enrich(hist, empty_static_kg(), now=0)
        assert enriched.keys() == hist.keys()
        assert enriched.variant_kind is VariantKind.ENRICHED

    def test_historical_subset_of_enriched(self):
        kg = build_static_kg(
            [("C_ASP", "interacts_with", "C_WARF"), ("C_ASP", "treats", "C_HTN")], "base"
        )
        hist = historical(
            t("v0", "prescribed", "C_ASP"),
            t("v0", "prescribed", "C_WARF"),
            t("v0", "diagnosed_with", "C_HTN"),
        )
        enriched = enrich(hist, kg, now=0)
        assert hist.keys() <= enriched.keys()

    def test_subject_private_triples_untouched(self):
        # a subject-asserted triple that also exists statically keeps its evidence
        kg = build_static_kg([("C_ASP", "treats", "C_HTN")], "base")
        private = t("C_ASP", "treats", "C_HTN")
        hist = historical(private, t("v0", "prescribed", "C_ASP"), t("v0", "diagnosed_with", "C_HTN"))
        enriched = enrich(hist, kg, now=0)
        assert enriched.by_key["C_ASP|treats|C_HTN"].evidence == ("r1",)

    def test_idempotence_on_key_sets(self):
        kg = build_static_kg([("C_ASP", "interacts_with", "C_WARF")], "base")
        hist = historical(t("v0", "prescribed", "C_ASP"), t("v0", "prescribed", "C_WARF"))
        once = enrich(hist, kg, now=0)
        again = enrich(
            GraphVariant("s1", VariantKind.HISTORICAL, 1, once.triples), kg, now=0
        )
        assert again.keys() == once.keys()

    def test_empty_historical(self):
        kg = build_static_kg([("A", "treats", "B")], "base")
        enriched = enrich(empty_variant("s1", VariantKind.HISTORICAL, 1), kg, now=0)
        assert len(enriched) == 0
