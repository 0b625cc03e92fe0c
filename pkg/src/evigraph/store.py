"""Versioned per-subject graph store.

Materializes the five variants per committed ingestion, serves immutable
snapshots, and persists an append-only JSON Lines log per subject that is
replayed on startup. One writer per subject; unlimited concurrent readers.
"""

from __future__ import annotations

import contextlib
import json
import logging
import threading
import urllib.parse
from dataclasses import dataclass
from pathlib import Path

from .dictionary import EntityCatalog
from .errors import (
    CanonicalizationError,
    ScoringUnavailableError,
    UnknownSubjectError,
    ValidationError,
    VersionError,
)
from .model import (
    DEFAULT_RELATION_VOCABULARY,
    GraphVariant,
    Triple,
    VariantKind,
    empty_variant,
    scored_from_json,
    scored_to_json,
    triple_from_json,
    triple_to_json,
)
from .records import SourceKind
from .scoring import EvidenceInfo, EvidenceSource, filter_variant

log = logging.getLogger(__name__)

_SOURCE_TO_EVIDENCE = {
    SourceKind.STRUCTURED: EvidenceSource.STRUCTURED,
    SourceKind.FREE_TEXT: EvidenceSource.FREE_TEXT,
}


def merge_into_historical(latest: GraphVariant, historical: GraphVariant) -> GraphVariant:
    """Union by identity key; longitudinal context is append-only.

    On key collision evidence lists are unioned and first_seen keeps the
    minimum. Re-merging the version already merged is a no-op.
    """
    if latest.subject_id != historical.subject_id:
        raise ValidationError(
            f"subject mismatch: {latest.subject_id!r} vs {historical.subject_id!r}"
        )
    if latest.variant_kind is not VariantKind.LATEST:
        raise ValidationError("merge source must be a latest variant")
    if historical.variant_kind is not VariantKind.HISTORICAL:
        raise ValidationError("merge target must be a historical variant")
    if historical.version == latest.version:
        return historical
    if historical.version != latest.version - 1:
        raise VersionError(
            f"cannot merge latest v{latest.version} into historical v{historical.version}"
        )
    merged = dict(historical.by_key)
    for triple in latest.triples:
        existing = merged.get(triple.key)
        if existing is None:
            merged[triple.key] = triple
        else:
            evidence = existing.evidence + tuple(
                e for e in triple.evidence if e not in existing.evidence
            )
            merged[triple.key] = existing.with_evidence(
                evidence, min(existing.first_seen, triple.first_seen)
            )
    return GraphVariant(
        subject_id=latest.subject_id,
        variant_kind=VariantKind.HISTORICAL,
        version=latest.version,
        triples=tuple(merged.values()),
    )


@dataclass(frozen=True)
class RecordInfo:
    subject_id: str
    visit_index: int
    source_kind: SourceKind


@dataclass
class _SubjectState:
    version: int = 0
    last_visit_index: int = -1
    latest: GraphVariant | None = None
    historical: GraphVariant | None = None
    enriched: GraphVariant | None = None
    confidence_aware: GraphVariant | None = None


class DynamicKGStore:
    """Holds committed variants per subject plus the global record registry."""

    def __init__(
        self,
        catalog: EntityCatalog,
        data_dir: str | Path | None = None,
        relation_vocabulary: frozenset[str] = DEFAULT_RELATION_VOCABULARY,
    ):
        self.catalog = catalog
        self.relation_vocabulary = relation_vocabulary
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self._subjects: dict[str, _SubjectState] = {}
        self._records: dict[str, RecordInfo] = {}
        self._lock = threading.Lock()
        self._writer_locks: dict[str, threading.Lock] = {}
        if self.data_dir is not None:
            self._subject_dir.mkdir(parents=True, exist_ok=True)
            self._replay()

    # -- bookkeeping -----------------------------------------------------

    @property
    def _subject_dir(self) -> Path:
        return self.data_dir / "subjects"

    def _log_path(self, subject_id: str) -> Path:
        return self._subject_dir / (urllib.parse.quote(subject_id, safe="") + ".jsonl")

    def _state(self, subject_id: str) -> _SubjectState:
        state = self._subjects.get(subject_id)
        if state is None:
            raise UnknownSubjectError(f"unknown subject {subject_id!r}")
        return state

    @contextlib.contextmanager
    def writer(self, subject_id: str):
        """Serializes ingestion commits for one subject."""
        with self._lock:
            lock = self._writer_locks.setdefault(subject_id, threading.Lock())
        with lock:
            yield

    def has_subject(self, subject_id: str) -> bool:
        with self._lock:
            return subject_id in self._subjects

    def has_record(self, record_id: str) -> bool:
        with self._lock:
            return record_id in self._records

    def record_info(self, record_id: str) -> EvidenceInfo | None:
        """Evidence resolver hook used by the scorer."""
        with self._lock:
            info = self._records.get(record_id)
        if info is None:
            return None
        return EvidenceInfo(info.visit_index, _SOURCE_TO_EVIDENCE[info.source_kind])

    def last_visit_index(self, subject_id: str) -> int:
        with self._lock:
            state = self._subjects.get(subject_id)
            return state.last_visit_index if state else -1

    def list_subjects(self) -> list[tuple[str, int]]:
        with self._lock:
            return sorted((sid, state.version) for sid, state in self._subjects.items())

    # -- variant construction and access ---------------------------------

    def instantiate_latest(self, subject_id: str, triples) -> GraphVariant:
        """Build the Latest variant for the next version, deduplicated by key.

        Every referenced entity must be canonical (a dictionary concept, the
        subject itself, or one of its visit nodes); the offending reference is
        named on rejection. An empty triple set is a valid empty visit.
        """
        deduped: dict[str, Triple] = {}
        for triple in sorted(triples, key=lambda t: t.key_tuple):
            if triple.relation not in self.relation_vocabulary:
                raise ValidationError(f"relation {triple.relation!r} not in vocabulary")
            for node in (triple.head, triple.tail):
                if not self.catalog.is_canonical(node, subject_id):
                    raise CanonicalizationError(
                        f"non-canonical entity reference {node!r} for subject {subject_id!r}"
                    )
            existing = deduped.get(triple.key)
            if existing is None:
                deduped[triple.key] = triple
            else:
                evidence = existing.evidence + tuple(
                    e for e in triple.evidence if e not in existing.evidence
                )
                deduped[triple.key] = existing.with_evidence(
                    evidence, min(existing.first_seen, triple.first_seen)
                )
        with self._lock:
            state = self._subjects.get(subject_id)
            version = (state.version if state else 0) + 1
        return GraphVariant(
            subject_id=subject_id,
            variant_kind=VariantKind.LATEST,
            version=version,
            triples=tuple(deduped.values()),
        )

    def current_historical(self, subject_id: str) -> GraphVariant:
        with self._lock:
            state = self._subjects.get(subject_id)
            if state is not None and state.historical is not None:
                return state.historical
        return empty_variant(subject_id, VariantKind.HISTORICAL, version=0)

    def get_variant(
        self, subject_id: str, variant_kind: VariantKind | str, tau: float | None = None
    ) -> GraphVariant:
        """Immutable snapshot of one variant; Filtered is derived on demand."""
        kind = VariantKind.parse(variant_kind)
        if (tau is not None) != (kind is VariantKind.FILTERED):
            raise ValidationError("tau must be supplied iff the filtered variant is requested")
        with self._lock:
            state = self._state(subject_id)
            snapshot = {
                VariantKind.LATEST: state.latest,
                VariantKind.HISTORICAL: state.historical,
                VariantKind.ENRICHED: state.enriched,
                VariantKind.CONFIDENCE_AWARE: state.confidence_aware,
                VariantKind.FILTERED: state.confidence_aware,
            }[kind]
        if snapshot is None:
            if kind in (VariantKind.CONFIDENCE_AWARE, VariantKind.FILTERED):
                raise ScoringUnavailableError(
                    f"confidence not yet computed for subject {subject_id!r}"
                )
            raise UnknownSubjectError(f"no committed graph for subject {subject_id!r}")
        if kind is VariantKind.FILTERED:
            return filter_variant(snapshot, tau)
        return snapshot

    # -- commits and persistence ------------------------------------------

    def commit(
        self,
        record_id: str,
        subject_id: str,
        visit_index: int,
        source_kind: SourceKind,
        latest: GraphVariant,
        historical: GraphVariant,
        enriched: GraphVariant,
        confidence_aware: GraphVariant,
        persist: bool = True,
    ) -> int:
        """Atomically publish a fully materialized version.

        The variants must share one subject and one version exactly one past
        the committed version. Nothing is visible until the swap.
        """
        variants = (latest, historical, enriched, confidence_aware)
        if any(v.subject_id != subject_id for v in variants):
            raise ValidationError("commit variants belong to different subjects")
        versions = {v.version for v in variants}
        if len(versions) != 1:
            raise VersionError(f"commit variants disagree on version: {sorted(versions)}")
        version = versions.pop()
        with self._lock:
            state = self._subjects.get(subject_id)
            committed = state.version if state else 0
            if version != committed + 1:
                raise VersionError(
                    f"commit version {version} does not follow committed version {committed}"
                )
            if record_id in self._records:
                raise ValidationError(f"record {record_id!r} already committed")
        if persist and self.data_dir is not None:
            self._append_log(
                subject_id,
                {
                    "version": version,
                    "record_id": record_id,
                    "subject_id": subject_id,
                    "visit_index": visit_index,
                    "source_kind": source_kind.value,
                    "triples": [triple_to_json(t) for t in latest.triples],
                    "scores": [scored_to_json(s) for s in confidence_aware.triples],
                },
            )
        with self._lock:
            state = self._subjects.setdefault(subject_id, _SubjectState())
            state.version = version
            state.last_visit_index = max(state.last_visit_index, visit_index)
            state.latest = latest
            state.historical = historical
            state.enriched = enriched
            state.confidence_aware = confidence_aware
            self._records[record_id] = RecordInfo(subject_id, visit_index, source_kind)
        return version

    def _append_log(self, subject_id: str, obj: dict) -> None:
        line = json.dumps(obj, sort_keys=True, separators=(",", ":"))
        with open(self._log_path(subject_id), "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()

    def _replay(self) -> None:
        """Rebuild state from the subject logs without re-scoring."""
        for path in sorted(self._subject_dir.glob("*.jsonl")):
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise ValidationError(f"{path}:{lineno}: corrupt log line ({exc})") from None
                    self._replay_commit(obj)
            log.info("replayed subject log %s", path.name)

    def _replay_commit(self, obj: dict) -> None:
        subject_id = obj["subject_id"]
        version = int(obj["version"])
        latest = GraphVariant(
            subject_id=subject_id,
            variant_kind=VariantKind.LATEST,
            version=version,
            triples=tuple(triple_from_json(t) for t in obj["triples"]),
        )
        historical = merge_into_historical(latest, self.current_historical(subject_id))
        scored = tuple(scored_from_json(s) for s in obj["scores"])
        confidence_aware = GraphVariant(
            subject_id=subject_id,
            variant_kind=VariantKind.CONFIDENCE_AWARE,
            version=version,
            triples=scored,
        )
        enriched = GraphVariant(
            subject_id=subject_id,
            variant_kind=VariantKind.ENRICHED,
            version=version,
            triples=tuple(s.triple for s in scored),
        )
        self.commit(
            record_id=obj["record_id"],
            subject_id=subject_id,
            visit_index=int(obj["visit_index"]),
            source_kind=SourceKind.parse(obj["source_kind"]),
            latest=latest,
            historical=historical,
            enriched=enriched,
            confidence_aware=confidence_aware,
            persist=False,
        )
