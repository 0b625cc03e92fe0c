"""Turn subject records into visit-graph triples.

Each record yields the visit pattern: subject --has_visit--> visit node,
plus one edge per canonicalized diagnosis / procedure / medication, plus
free-text mentions found by a pluggable note extractor.
"""

from __future__ import annotations

from typing import Protocol

from .dictionary import ConceptDictionary, Unmapped
from .model import Triple, visit_node_id
from .records import SubjectRecord

#: Mention list -> relation emitted for its canonicalized entries.
LIST_RELATIONS = {
    "diagnoses": "diagnosed_with",
    "procedures": "underwent",
    "medications": "prescribed",
}


class NoteExtractor(Protocol):
    """Free-text extraction hook; returns concept ids to attach as mentions."""

    def extract(self, note_text: str, dictionary: ConceptDictionary) -> list[str]:
        ...


class GazetteerNoteExtractor:
    """Bundled extractor: exact dictionary surface-form matching in the note."""

    def extract(self, note_text: str, dictionary: ConceptDictionary) -> list[str]:
        return [concept_id for concept_id, _ in dictionary.find_in_text(note_text)]


def extract_triples(
    record: SubjectRecord,
    dictionary: ConceptDictionary,
    note_extractor: NoteExtractor | None = None,
) -> tuple[set[Triple], list[Unmapped]]:
    """Extract the record's triples and report unmapped mentions.

    Unmapped mentions are counted per occurrence and never enter the graph.
    """
    visit = visit_node_id(record.subject_id, record.visit_index)
    evidence = (record.record_id,)
    seen = record.visit_index
    triples: set[Triple] = {Triple(record.subject_id, "has_visit", visit, seen, evidence)}
    unmapped: list[Unmapped] = []
    for list_name, mentions in record.mention_lists:
        relation = LIST_RELATIONS[list_name]
        for mention in mentions:
            resolved = dictionary.canonicalize(mention)
            if isinstance(resolved, Unmapped):
                unmapped.append(resolved)
                continue
            concept_id, _ = resolved
            triples.add(Triple(visit, relation, concept_id, seen, evidence))
    if record.note_text:
        extractor = note_extractor or GazetteerNoteExtractor()
        for concept_id in extractor.extract(record.note_text, dictionary):
            triples.add(Triple(visit, "mentioned", concept_id, seen, evidence))
    return triples, unmapped
