import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from evigraph import AppConfig, ConceptDictionary, Engine
from evigraph.records import SourceKind, SubjectRecord


@pytest.fixture(scope="session")
def dictionary() -> ConceptDictionary:
    return ConceptDictionary.from_file(AppConfig().resolved_dictionary_path())


@pytest.fixture()
def engine() -> Engine:
    """In-memory engine over the bundled dictionary and static background."""
    return Engine(AppConfig())


def make_record(
    subject_id: str,
    visit_index: int,
    diagnoses=(),
    procedures=(),
    medications=(),
    note_text=None,
    source_kind=SourceKind.STRUCTURED,
    record_id=None,
) -> SubjectRecord:
    return SubjectRecord(
        record_id=record_id or f"{subject_id}-v{visit_index}",
        subject_id=subject_id,
        visit_index=visit_index,
        timestamp=f"2024-01-{visit_index + 1:02d}T09:00:00Z",
        source_kind=source_kind,
        diagnoses=tuple(diagnoses),
        procedures=tuple(procedures),
        medications=tuple(medications),
        note_text=note_text,
    )
