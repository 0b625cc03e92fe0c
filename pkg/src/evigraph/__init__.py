"""Uncertainty-aware dynamic knowledge graphs with confidence-scored retrieval."""

from .config import AppConfig, RiskRules, load_config
from .dictionary import ConceptDictionary, EntityCatalog, Unmapped, normalize_surface
from .errors import EvigraphError, ValidationError
from .extraction import GazetteerNoteExtractor, extract_triples
from .metrics import auprc, auroc
from .model import (
    COLOR_ROLES,
    Entity,
    EntityType,
    GraphVariant,
    ScoredTriple,
    Triple,
    VariantKind,
)
from .pipeline import Engine, IngestReport
from .qa import QAMode, QARequest, compare, retrieve, run_whatif
from .records import SourceKind, SubjectRecord
from .scoring import (
    FilterThreshold,
    HeuristicScorer,
    ScorerConfig,
    ScoringContext,
    build_context,
    filter_variant,
    materialize_confidence,
    score_heuristic,
)
from .statickg import StaticKG, enrich, load_static_kg
from .store import DynamicKGStore, merge_into_historical

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "COLOR_ROLES",
    "ConceptDictionary",
    "DynamicKGStore",
    "Engine",
    "Entity",
    "EntityCatalog",
    "EntityType",
    "EvigraphError",
    "FilterThreshold",
    "GazetteerNoteExtractor",
    "GraphVariant",
    "HeuristicScorer",
    "IngestReport",
    "QAMode",
    "QARequest",
    "RiskRules",
    "ScoredTriple",
    "ScorerConfig",
    "ScoringContext",
    "SourceKind",
    "StaticKG",
    "SubjectRecord",
    "Triple",
    "Unmapped",
    "ValidationError",
    "VariantKind",
    "auprc",
    "auroc",
    "build_context",
    "compare",
    "enrich",
    "extract_triples",
    "filter_variant",
    "load_config",
    "load_static_kg",
    "materialize_confidence",
    "merge_into_historical",
    "normalize_surface",
    "retrieve",
    "run_whatif",
    "score_heuristic",
]
