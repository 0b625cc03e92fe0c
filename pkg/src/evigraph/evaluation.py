"""Outcome-prediction harness: per-subject risk, metric reports, threshold sweep.

Reproduces the evaluation protocol shape at desk scale: binary outcome
prediction per subject over a chosen graph variant, AUROC/AUPRC over the
cohort, a threshold sweep over the filtered variant, and run averaging.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field

from .config import RiskRules
from .errors import ValidationError
from .llm import LLMRiskGenerator, serialize_context_block  # noqa: F401 (risk generator re-export)
from .metrics import auprc, auroc
from .model import GraphVariant, ScoredTriple, VariantKind

log = logging.getLogger(__name__)

DEFAULT_SWEEP_TAUS = tuple(round(i * 0.1, 1) for i in range(11))


@dataclass(frozen=True)
class PredictorConfig:
    variant_kind: VariantKind = VariantKind.HISTORICAL
    tau: float | None = None
    generator: str = "rule"  # rule | hash | llm
    seed: int = 0

    def __post_init__(self):
        if self.generator not in ("rule", "hash", "llm"):
            raise ValidationError(f"unknown risk generator {self.generator!r}")
        if (self.tau is not None) != (self.variant_kind is VariantKind.FILTERED):
            raise ValidationError("tau must be supplied iff predicting over the filtered variant")


@dataclass(frozen=True)
class PredictionTask:
    subject_ids: tuple[str, ...]
    labels: dict[str, int]
    predictor: PredictorConfig = field(default_factory=PredictorConfig)
    runs: int = 1

    def __post_init__(self):
        missing = [s for s in self.subject_ids if s not in self.labels]
        if missing:
            raise ValidationError(f"subjects without labels: {missing[:5]}")
        if self.runs < 1:
            raise ValidationError("runs must be >= 1")


@dataclass(frozen=True)
class RiskPrediction:
    value: float
    fallback: bool = False


@dataclass(frozen=True)
class MetricReport:
    auprc: float
    auroc: float
    per_run: tuple[tuple[float, float], ...]
    n_subjects: int
    n_fallbacks: int = 0

    def to_json(self) -> dict:
        return {
            "auprc": self.auprc,
            "auroc": self.auroc,
            "per_run": [list(pair) for pair in self.per_run],
            "n_subjects": self.n_subjects,
            "n_fallbacks": self.n_fallbacks,
        }


def rule_based_risk(variant: GraphVariant, rules: RiskRules) -> float:
    """Risk from configured risk-relation counts.

    Score-bearing variants weight each matching triple by its confidence;
    unscored variants count 1 per triple. Capped into [0, 1].
    """
    relations = set(rules.relations)
    concepts = set(rules.concepts)
    total = 0.0
    for entry in variant.triples:
        scored = isinstance(entry, ScoredTriple)
        triple = entry.triple if scored else entry
        if triple.relation in relations and triple.tail in concepts:
            total += entry.confidence if scored else 1.0
    return min(1.0, total / rules.cap)


def hash_based_risk(subject_id: str, seed: int) -> float:
    digest = hashlib.sha256(f"{seed}:{subject_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def serialize_variant_block(variant: GraphVariant) -> str:
    lines = []
    for entry in variant.triples:
        scored = isinstance(entry, ScoredTriple)
        t = entry.triple if scored else entry
        line = f"({t.head}, {t.relation}, {t.tail})"
        if scored:
            line += f" confidence={entry.confidence:.2f}"
        lines.append(line)
    return "\n".join(lines) if lines else "(empty graph)"


def predict_risk(
    engine,
    subject_id: str,
    predictor: PredictorConfig,
    rules: RiskRules,
    run_seed: int | None = None,
) -> RiskPrediction:
    """Outcome probability for one subject over the configured variant."""
    variant = engine.get_variant(subject_id, predictor.variant_kind, predictor.tau)
    if predictor.generator == "rule":
        return RiskPrediction(rule_based_risk(variant, rules))
    if predictor.generator == "hash":
        seed = predictor.seed if run_seed is None else run_seed
        return RiskPrediction(hash_based_risk(subject_id, seed))
    fallback_value = engine.config.scorer.default_on_failure
    try:
        generator = LLMRiskGenerator(engine.llm_client, engine.config.prompts_dir)
        value = generator.predict(subject_id, serialize_variant_block(variant))
        return RiskPrediction(value)
    except Exception as exc:  # malformed responses and transport errors alike
        log.warning("risk prediction fell back to %s for %s: %s", fallback_value, subject_id, exc)
        return RiskPrediction(fallback_value, fallback=True)


def evaluate_task(engine, task: PredictionTask, rules: RiskRules) -> MetricReport:
    """Run the task `runs` times (seed varies per run) and average the metrics."""
    labels = [task.labels[s] for s in task.subject_ids]
    per_run = []
    fallbacks = 0
    for run in range(task.runs):
        scores = []
        for subject_id in task.subject_ids:
            prediction = predict_risk(
                engine, subject_id, task.predictor, rules, run_seed=task.predictor.seed + run
            )
            fallbacks += int(prediction.fallback)
            scores.append(prediction.value)
        per_run.append((auprc(scores, labels), auroc(scores, labels)))
    mean_auprc = sum(p for p, _ in per_run) / len(per_run)
    mean_auroc = sum(a for _, a in per_run) / len(per_run)
    return MetricReport(
        auprc=mean_auprc,
        auroc=mean_auroc,
        per_run=tuple(per_run),
        n_subjects=len(task.subject_ids),
        n_fallbacks=fallbacks,
    )


@dataclass(frozen=True)
class SweepRow:
    method: str
    variant: str
    tau: float | None
    report: MetricReport

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "variant": self.variant,
            "tau": self.tau,
            **self.report.to_json(),
        }


def run_sweep(
    engine,
    task: PredictionTask,
    rules: RiskRules,
    taus: tuple[float, ...] = DEFAULT_SWEEP_TAUS,
) -> list[SweepRow]:
    """Baseline and confidence-aware rows plus one filtered row per tau."""
    from dataclasses import replace

    rows = [
        SweepRow(
            "baseline",
            VariantKind.HISTORICAL.value,
            None,
            evaluate_task(
                engine,
                replace(task, predictor=replace(task.predictor, variant_kind=VariantKind.HISTORICAL, tau=None)),
                rules,
            ),
        ),
        SweepRow(
            "confidence_aware",
            VariantKind.CONFIDENCE_AWARE.value,
            None,
            evaluate_task(
                engine,
                replace(
                    task,
                    predictor=replace(task.predictor, variant_kind=VariantKind.CONFIDENCE_AWARE, tau=None),
                ),
                rules,
            ),
        ),
    ]
    for tau in taus:
        report = evaluate_task(
            engine,
            replace(task, predictor=replace(task.predictor, variant_kind=VariantKind.FILTERED, tau=tau)),
            rules,
        )
        rows.append(SweepRow("filtered", VariantKind.FILTERED.value, tau, report))
    return rows


def rows_to_csv(rows: list[SweepRow]) -> str:
    lines = ["method,variant,tau,auprc,auroc"]
    for row in rows:
        tau = "" if row.tau is None else f"{row.tau:.1f}"
        lines.append(
            f"{row.method},{row.variant},{tau},{row.report.auprc:.6f},{row.report.auroc:.6f}"
        )
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[SweepRow]) -> str:
    return json.dumps(
        {"schema_version": 1, "rows": [row.to_json() for row in rows]},
        sort_keys=True,
        indent=2,
    )
