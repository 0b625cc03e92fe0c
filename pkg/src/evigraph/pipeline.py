"""End-to-end engine: wiring from record ingestion to scored variants.

One ingested record runs extract -> latest -> historical -> enriched ->
confidence-aware as a single atomic commit; no partial variant is ever
visible, and a failed stage leaves the store untouched.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .config import AppConfig
from .dictionary import ConceptDictionary, EntityCatalog
from .errors import DuplicateRecordError, VisitOrderError
from .extraction import GazetteerNoteExtractor, NoteExtractor, extract_triples
from .llm import LLMAnswerGenerator, LLMClient, LLMEndpoint, LLMScorer
from .model import GraphVariant, VariantKind
from .records import SubjectRecord, load_records_jsonl
from .scoring import HeuristicScorer, materialize_confidence
from .statickg import StaticKG, empty_static_kg, enrich, load_static_kg
from .store import DynamicKGStore, merge_into_historical

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IngestReport:
    subject_id: str
    record_id: str
    version: int
    n_triples: int
    n_unmapped: int

    def to_json(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "record_id": self.record_id,
            "version": self.version,
            "n_triples": self.n_triples,
            "n_unmapped": self.n_unmapped,
        }


class Engine:
    """Owns the store, dictionary, static background, and the scorer."""

    def __init__(
        self,
        config: AppConfig | None = None,
        dictionary: ConceptDictionary | None = None,
        static_kg: StaticKG | None = None,
        data_dir: str | Path | None = None,
        note_extractor: NoteExtractor | None = None,
        scorer=None,
    ):
        self.config = config or AppConfig()
        self.dictionary = dictionary or ConceptDictionary.from_file(
            self.config.resolved_dictionary_path()
        )
        if static_kg is not None:
            self.static_kg = static_kg
        else:
            path = self.config.resolved_static_kg_path()
            self.static_kg = load_static_kg(path) if path.exists() else empty_static_kg()
        self.catalog = EntityCatalog(self.dictionary)
        resolved_dir = data_dir if data_dir is not None else self.config.data_dir
        self.store = DynamicKGStore(self.catalog, resolved_dir)
        self.note_extractor = note_extractor or GazetteerNoteExtractor()
        self.llm_client = self._build_llm_client()
        self.scorer = scorer or self._build_scorer()

    def _build_llm_client(self) -> LLMClient | None:
        settings = self.config.llm
        endpoint = LLMEndpoint.from_env(
            base_url=settings.base_url,
            model=settings.model,
            api_key=settings.api_key,
            timeout=settings.timeout,
            max_inflight=settings.max_inflight,
        )
        return LLMClient(endpoint) if endpoint else None

    def _build_scorer(self):
        heuristic = HeuristicScorer(self.config.scorer, self.store.record_info)
        if self.config.scorer_backend == "llm":
            if self.llm_client is None:
                log.warning("llm scorer configured but no endpoint available; using heuristic")
                return heuristic
            return LLMScorer(self.llm_client, heuristic, self.config.prompts_dir)
        return heuristic

    def answer_generator(self):
        from .qa import DeterministicAnswerGenerator

        if self.config.answer_generator == "llm" and self.llm_client is not None:
            return LLMAnswerGenerator(self.llm_client, self.config.prompts_dir)
        return DeterministicAnswerGenerator()

    def spawn_ephemeral(self) -> "Engine":
        """Fresh in-memory engine sharing dictionary, background, and config."""
        return Engine(
            config=self.config,
            dictionary=self.dictionary,
            static_kg=self.static_kg,
            data_dir=None,
            note_extractor=self.note_extractor,
        )

    # -- ingestion ---------------------------------------------------------

    def ingest_record(self, record: SubjectRecord | dict) -> IngestReport:
        if isinstance(record, dict):
            record = SubjectRecord.from_json(record)
        with self.store.writer(record.subject_id):
            # validated under the writer lock so concurrent same-subject
            # ingests cannot both pass the ordering check
            if self.store.has_record(record.record_id):
                raise DuplicateRecordError(f"record {record.record_id!r} already ingested")
            last = self.store.last_visit_index(record.subject_id)
            if record.visit_index <= last:
                raise VisitOrderError(
                    f"visit_index {record.visit_index} does not increase past {last} "
                    f"for subject {record.subject_id!r}"
                )
            triples, unmapped = extract_triples(record, self.dictionary, self.note_extractor)
            latest = self.store.instantiate_latest(record.subject_id, triples)
            historical = merge_into_historical(
                latest, self.store.current_historical(record.subject_id)
            )
            enriched = enrich(historical, self.static_kg, now=record.visit_index)
            confidence_aware = materialize_confidence(
                enriched, self.scorer, context_source=historical, now=record.visit_index
            )
            version = self.store.commit(
                record_id=record.record_id,
                subject_id=record.subject_id,
                visit_index=record.visit_index,
                source_kind=record.source_kind,
                latest=latest,
                historical=historical,
                enriched=enriched,
                confidence_aware=confidence_aware,
            )
        return IngestReport(
            subject_id=record.subject_id,
            record_id=record.record_id,
            version=version,
            n_triples=len(latest),
            n_unmapped=len(unmapped),
        )

    def ingest_file(self, path: str | Path) -> list[IngestReport]:
        return [self.ingest_record(r) for r in load_records_jsonl(path)]

    # -- reads ---------------------------------------------------------------

    def get_variant(
        self, subject_id: str, variant_kind: VariantKind | str, tau: float | None = None
    ) -> GraphVariant:
        return self.store.get_variant(subject_id, variant_kind, tau)

    def list_subjects(self) -> list[tuple[str, int]]:
        return self.store.list_subjects()
