"""Application configuration: one JSON file plus environment overrides.

Precedence: built-in defaults < config file < environment variables.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .errors import ValidationError
from .scoring import DEFAULT_EXCLUSIVE_PAIRS, EvidenceSource, ScorerConfig

ENV_DATA_DIR = "EVIGRAPH_DATA_DIR"
ENV_TAU = "EVIGRAPH_TAU"
ENV_API_KEY = "EVIGRAPH_API_KEY"

#: Risk rules used by the rule-based outcome predictor.
DEFAULT_RISK_RELATIONS = ("diagnosed_with", "mentioned")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("evigraph") / "fixtures" / name))


@dataclass(frozen=True)
class RiskRules:
    relations: tuple[str, ...] = DEFAULT_RISK_RELATIONS
    concepts: tuple[str, ...] = ()
    cap: int = 5

    def __post_init__(self):
        if self.cap < 1:
            raise ValidationError("risk cap must be >= 1")


@dataclass(frozen=True)
class LLMSettings:
    base_url: str | None = None
    model: str = "default"
    api_key: str | None = None
    timeout: float = 30.0
    max_inflight: int = 4


@dataclass(frozen=True)
class AppConfig:
    data_dir: str | None = None
    dictionary_path: str | None = None
    static_kg_path: str | None = None
    prompts_dir: str | None = None
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    tau_default: float = 0.8
    scorer_backend: str = "heuristic"  # heuristic | llm
    answer_generator: str = "deterministic"  # deterministic | llm
    llm: LLMSettings = field(default_factory=LLMSettings)
    risk: RiskRules = field(default_factory=RiskRules)
    api_key: str | None = None

    def __post_init__(self):
        if self.scorer_backend not in ("heuristic", "llm"):
            raise ValidationError(f"unknown scorer backend {self.scorer_backend!r}")
        if self.answer_generator not in ("deterministic", "llm"):
            raise ValidationError(f"unknown answer generator {self.answer_generator!r}")
        if not 0.0 <= self.tau_default <= 1.0:
            raise ValidationError("tau_default outside [0, 1]")

    def resolved_dictionary_path(self) -> Path:
        return Path(self.dictionary_path) if self.dictionary_path else fixture_path("concepts.json")

    def resolved_static_kg_path(self) -> Path:
        return Path(self.static_kg_path) if self.static_kg_path else fixture_path("static_kg.jsonl")


def _scorer_from_obj(obj: dict) -> ScorerConfig:
    priors = obj.get("source_priors")
    kwargs = {}
    if "weights" in obj:
        kwargs["weights"] = tuple(obj["weights"])
    if priors:
        kwargs["source_priors"] = {EvidenceSource(k): float(v) for k, v in priors.items()}
    for name in ("recency_lambda", "rep_cap", "max_context", "default_on_failure", "retries"):
        if name in obj:
            kwargs[name] = obj[name]
    if "mutually_exclusive" in obj:
        kwargs["exclusive_pairs"] = tuple(tuple(pair) for pair in obj["mutually_exclusive"])
    return ScorerConfig(**kwargs)


def load_config(path: str | Path | None = None, apply_env: bool = True) -> AppConfig:
    obj: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    config = AppConfig(
        data_dir=obj.get("data_dir"),
        dictionary_path=obj.get("dictionary"),
        static_kg_path=obj.get("static_kg"),
        prompts_dir=obj.get("prompts_dir"),
        scorer=_scorer_from_obj(obj.get("scorer", {})),
        tau_default=float(obj.get("tau_default", 0.8)),
        scorer_backend=obj.get("scorer_backend", "heuristic"),
        answer_generator=obj.get("answer_generator", "deterministic"),
        llm=LLMSettings(**obj.get("llm", {})),
        risk=RiskRules(
            relations=tuple(obj.get("risk", {}).get("relations", DEFAULT_RISK_RELATIONS)),
            concepts=tuple(obj.get("risk", {}).get("concepts", ())),
            cap=int(obj.get("risk", {}).get("cap", 5)),
        ),
        api_key=obj.get("api_key"),
    )
    if apply_env:
        config = apply_env_overrides(config)
    return config


def apply_env_overrides(config: AppConfig) -> AppConfig:
    updates = {}
    if os.environ.get(ENV_DATA_DIR):
        updates["data_dir"] = os.environ[ENV_DATA_DIR]
    if os.environ.get(ENV_TAU):
        updates["tau_default"] = float(os.environ[ENV_TAU])
    if os.environ.get(ENV_API_KEY):
        updates["api_key"] = os.environ[ENV_API_KEY]
    llm_updates = {}
    from .llm import ENV_API_KEY as LLM_KEY, ENV_BASE_URL, ENV_MODEL

    if os.environ.get(ENV_BASE_URL):
        llm_updates["base_url"] = os.environ[ENV_BASE_URL]
    if os.environ.get(ENV_MODEL):
        llm_updates["model"] = os.environ[ENV_MODEL]
    if os.environ.get(LLM_KEY):
        llm_updates["api_key"] = os.environ[LLM_KEY]
    if llm_updates:
        updates["llm"] = replace(config.llm, **llm_updates)
    return replace(config, **updates) if updates else config
