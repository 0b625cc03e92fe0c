import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import heuristic_formula
from evigraph.errors import ValidationError
from evigraph.model import GraphVariant, ScoredTriple, Triple, VariantKind
from evigraph.scoring import (
    EvidenceInfo,
    EvidenceSource,
    FilterThreshold,
    HeuristicScorer,
    ScorerConfig,
    ScoringContext,
    build_context,
    filter_variant,
    materialize_confidence,
    score_heuristic,
)

CFG = ScorerConfig()


def t(head, rel, tail, seen=0, ev=("r1",)):
    return Triple(head, rel, tail, seen, tuple(ev))


def ctx_of(target, *triples, max_size=32):
    current = tuple(tr for tr in triples if tr.first_seen >= target.first_seen)
    past = tuple(tr for tr in triples if tr.first_seen < target.first_seen)
    return ScoringContext(target, current, past, max_size)


class TestScorerConfig:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            ScorerConfig(weights=(0.5, 0.5, 0.5, 0.5))

    def test_priors_in_range(self):
        with pytest.raises(ValidationError):
            ScorerConfig(source_priors={EvidenceSource.STRUCTURED: 1.5})

    def test_threshold_range(self):
        with pytest.raises(ValidationError):
            FilterThreshold(1.01)
        FilterThreshold(0.0)
        FilterThreshold(1.0)


class TestBuildContext:
    def test_isolated_target_has_empty_context(self):
        hist = GraphVariant(
            "s1", VariantKind.HISTORICAL, 1,
            (t("a", "prescribed", "b"), t("x", "prescribed", "y")),
        )
        ctx = build_context(t("a", "prescribed", "b"), hist, now=0)
        assert len(ctx) == 0

    def test_cap_prioritizes_current_commit(self):
        triples = [t("a", "prescribed", f"c{i}", seen=0) for i in range(3)]
        triples += [t("a", "diagnosed_with", f"d{i}", seen=1) for i in range(2)]
        hist = GraphVariant("s1", VariantKind.HISTORICAL, 2, tuple(triples))
        target = t("a", "underwent", "p", seen=1)
        ctx = build_context(target, hist, max_size=2, now=1)
        assert len(ctx) == 2
        assert all(tr.first_seen == 1 for tr in ctx.current_triples)
        assert ctx.past_triples == ()

    def test_past_ties_broken_by_key_order(self):
        older = [
            t("a", "prescribed", "zz", seen=0),
            t("a", "prescribed", "aa", seen=0),
        ]
        hist = GraphVariant("s1", VariantKind.HISTORICAL, 2, tuple(older))
        target = t("a", "underwent", "p", seen=1)
        ctx = build_context(target, hist, now=1)
        assert [tr.tail for tr in ctx.past_triples] == ["aa", "zz"]

    def test_descending_first_seen_for_past(self):
        older = [t("a", "prescribed", f"c{i}", seen=i) for i in range(3)]
        hist = GraphVariant("s1", VariantKind.HISTORICAL, 4, tuple(older))
        target = t("a", "underwent", "p", seen=3)
        ctx = build_context(target, hist, now=3)
        assert [tr.first_seen for tr in ctx.past_triples] == [2, 1, 0]

    def test_target_excluded_from_own_context(self):
        target = t("a", "prescribed", "b")
        hist = GraphVariant("s1", VariantKind.HISTORICAL, 1, (target,))
        assert len(build_context(target, hist, now=0)) == 0


class TestScoreHeuristic:
    def test_hand_example_mixed_signals(self):
        # q=0.8 structured, n_obs=2, 3 supporting / 0 conflicting, dt=0
        target = t("v", "prescribed", "C_ASP", seen=3, ev=("r1", "r2"))
        context = ctx_of(
            target,
            t("v", "diagnosed_with", "C_HTN", seen=3),
            t("v", "underwent", "C_ECHO", seen=3),
            t("s", "has_visit", "v", seen=3),
        )
        scored = score_heuristic(target, context, CFG, now=3)
        expected = heuristic_formula(q_src=0.8, n_obs=2, n_support=3, n_conflict=0, dt=0)
        assert expected == pytest.approx(0.700, abs=1e-9)
        assert scored.confidence == pytest.approx(expected, abs=1e-9)
        assert len(scored.supporting) == 3
        assert scored.conflicting == ()

    def test_hand_example_no_evidence_pathways(self):
        target = t("v", "prescribed", "C_ASP", seen=0, ev=("r1",))
        scored = score_heuristic(target, ScoringContext(target), CFG, now=0)
        expected = heuristic_formula(q_src=0.8, n_obs=1, n_support=0, n_conflict=0, dt=0)
        assert expected == pytest.approx(0.570, abs=1e-9)
        assert scored.confidence == pytest.approx(expected, abs=1e-9)

    def test_clamp_upper_bound(self):
        cfg = ScorerConfig(source_priors={EvidenceSource.STRUCTURED: 1.0})
        target = t("v", "prescribed", "C_ASP", seen=0, ev=tuple(f"r{i}" for i in range(9)))
        context = ctx_of(target, *(t("v", "diagnosed_with", f"d{i}") for i in range(20)))
        scored = score_heuristic(target, context, cfg, now=0)
        assert scored.confidence <= 1.0

    def test_rationale_lists_signals(self):
        target = t("v", "prescribed", "C_ASP")
        scored = score_heuristic(target, ScoringContext(target), CFG, now=0)
        for token in ("source=", "repetition=", "cooccurrence=", "recency="):
            assert token in scored.rationale

    def test_conflict_detection_same_endpoints_only(self):
        target = t("v", "prescribed", "C_ASP", seen=0)
        conflicting = t("v", "diagnosed_with", "C_ASP", seen=0)
        elsewhere = t("w", "diagnosed_with", "C_ASP", seen=0)
        scored = score_heuristic(target, ctx_of(target, conflicting, elsewhere), CFG, now=0)
        assert scored.conflicting == (conflicting.key,)
        assert elsewhere.key in scored.supporting

    def test_repetition_counts_same_assertion_at_other_visits(self):
        target = t("v4", "prescribed", "C_ASP", seen=4)
        repeats = [t(f"v{i}", "prescribed", "C_ASP", seen=i) for i in range(4)]
        scored = score_heuristic(target, ctx_of(target, *repeats), CFG, now=4)
        assert "n_obs=5" in scored.rationale

    def test_evidence_resolver_drives_source_and_recency(self):
        infos = {
            "r1": EvidenceInfo(0, EvidenceSource.FREE_TEXT),
            "r2": EvidenceInfo(2, EvidenceSource.STRUCTURED),
        }
        target = t("v", "prescribed", "C_ASP", seen=0, ev=("r1", "r2"))
        scored = score_heuristic(
            target, ScoringContext(target), CFG, now=4, evidence_resolver=infos.get
        )
        expected = heuristic_formula(q_src=0.8, n_obs=2, n_support=0, n_conflict=0, dt=2)
        assert scored.confidence == pytest.approx(expected, abs=1e-9)

    def test_static_evidence_uses_static_prior(self):
        target = t("a", "interacts_with", "b", seen=2, ev=("static:base",))
        scored = score_heuristic(target, ScoringContext(target), CFG, now=2)
        expected = heuristic_formula(q_src=0.9, n_obs=1, n_support=0, n_conflict=0, dt=0)
        assert scored.confidence == pytest.approx(expected, abs=1e-9)


class TestMonotonicities:
    @given(
        n_obs=st.integers(1, 8),
        extra=st.integers(1, 5),
        supports=st.integers(0, 10),
        conflicts=st.integers(0, 5),
        dt=st.integers(0, 20),
    )
    @settings(max_examples=60, deadline=None)
    def test_repetition_monotone(self, n_obs, extra, supports, conflicts, dt):
        def run(count):
            target = t("v", "prescribed", "C", seen=0, ev=tuple(f"r{i}" for i in range(count)))
            context = ctx_of(
                target,
                *(t("v", "underwent", f"p{i}") for i in range(supports)),
                *(t("v", "diagnosed_with", "C") for _ in range(min(conflicts, 1))),
            )
            return score_heuristic(target, context, CFG, now=dt).confidence

        assert run(n_obs + extra) >= run(n_obs) - 1e-12

    @given(supports=st.integers(0, 10), conflicts=st.integers(0, 6))
    @settings(max_examples=60, deadline=None)
    def test_conflict_monotone(self, supports, conflicts):
        target = t("v", "prescribed", "C", seen=0)

        def run(n_conflict):
            context = ctx_of(
                target,
                *(t("v", "underwent", f"p{i}") for i in range(supports)),
                *(t("v", "diagnosed_with" if i == 0 else "underwent", "C") for i in range(n_conflict)),
            )
            return score_heuristic(target, context, CFG, now=0).confidence

        assert run(conflicts + 1) <= run(conflicts) + 1e-12

    @given(dt=st.integers(0, 30), extra=st.integers(1, 10))
    @settings(max_examples=60, deadline=None)
    def test_recency_monotone(self, dt, extra):
        target = t("v", "prescribed", "C", seen=0)
        near = score_heuristic(target, ScoringContext(target), CFG, now=dt).confidence
        far = score_heuristic(target, ScoringContext(target), CFG, now=dt + extra).confidence
        assert far <= near + 1e-12

    @given(
        q=st.sampled_from([0.0, 0.3, 0.5, 0.8, 1.0]),
        n_ev=st.integers(0, 10),
        supports=st.integers(0, 20),
        conflicts=st.integers(0, 8),
        dt=st.integers(0, 50),
    )
    @settings(max_examples=120, deadline=None)
    def test_bounds(self, q, n_ev, supports, conflicts, dt):
        cfg = ScorerConfig(source_priors={EvidenceSource.STRUCTURED: q})
        target = t("v", "prescribed", "C", seen=0, ev=tuple(f"r{i}" for i in range(n_ev)))
        context = ctx_of(
            target,
            *(t("v", "underwent", f"p{i}") for i in range(supports)),
            *(t("v", "diagnosed_with", "C") for _ in range(min(1, conflicts))),
            max_size=64,
        )
        scored = score_heuristic(target, context, cfg, now=dt)
        assert 0.0 <= scored.confidence <= 1.0


class TestMaterializeAndFilter:
    def _scored_variant(self, scores):
        triples = tuple(
            ScoredTriple(t(f"h{i}", "prescribed", f"t{i}"), s) for i, s in enumerate(scores)
        )
        return GraphVariant("s1", VariantKind.CONFIDENCE_AWARE, 1, triples)

    def test_empty_graph(self):
        enriched = GraphVariant("s1", VariantKind.ENRICHED, 1, ())
        scored = materialize_confidence(enriched, HeuristicScorer(CFG))
        assert len(scored) == 0

    def test_key_set_preserved(self):
        enriched = GraphVariant(
            "s1", VariantKind.ENRICHED, 2,
            (t("s1", "has_visit", "v0"), t("v0", "prescribed", "C_ASP")),
        )
        scored = materialize_confidence(enriched, HeuristicScorer(CFG))
        assert scored.keys() == enriched.keys()
        assert scored.variant_kind is VariantKind.CONFIDENCE_AWARE

    def test_rescoring_is_deterministic(self):
        enriched = GraphVariant(
            "s1", VariantKind.ENRICHED, 2,
            (t("s1", "has_visit", "v0"), t("v0", "prescribed", "C_ASP")),
        )
        a = materialize_confidence(enriched, HeuristicScorer(CFG))
        b = materialize_confidence(enriched, HeuristicScorer(CFG))
        assert a.triples == b.triples

    def test_filter_direct_application(self):
        variant = self._scored_variant([0.91, 0.42])
        kept = filter_variant(variant, 0.8)
        assert [s.confidence for s in kept.triples] == [0.91]
        assert kept.tau == 0.8

    def test_filter_zero_keeps_all(self):
        variant = self._scored_variant([0.1, 0.0, 0.9])
        assert filter_variant(variant, 0.0).keys() == variant.keys()

    def test_filter_boundary_inclusive(self):
        variant = self._scored_variant([0.8])
        assert len(filter_variant(variant, 0.8)) == 1

    def test_filter_monotone_shrinkage(self):
        rng = random.Random(5)
        variant = self._scored_variant([rng.random() for _ in range(40)])
        taus = sorted(rng.random() for _ in range(6))
        previous = filter_variant(variant, taus[0]).keys()
        for tau in taus[1:]:
            current = filter_variant(variant, tau).keys()
            assert current <= previous
            previous = current
