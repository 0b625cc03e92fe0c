"""Subject records: the per-visit ingestion unit."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError


class SourceKind(enum.Enum):
    STRUCTURED = "structured"
    FREE_TEXT = "free_text"

    @classmethod
    def parse(cls, value: "str | SourceKind") -> "SourceKind":
        if isinstance(value, cls):
            return value
        norm = value.strip().lower().replace("-", "_")
        aliases = {"structured": cls.STRUCTURED, "freetext": cls.FREE_TEXT, "free_text": cls.FREE_TEXT}
        if norm not in aliases:
            raise ValidationError(f"unknown source_kind {value!r}")
        return aliases[norm]


@dataclass(frozen=True)
class SubjectRecord:
    """One timestamped visit for one subject.

    visit_index is the ordering authority; the timestamp is metadata only.
    """

    record_id: str
    subject_id: str
    visit_index: int
    timestamp: str
    source_kind: SourceKind
    diagnoses: tuple[str, ...] = ()
    procedures: tuple[str, ...] = ()
    medications: tuple[str, ...] = ()
    note_text: str | None = None

    def __post_init__(self):
        if not self.record_id:
            raise ValidationError("record_id must be non-empty")
        if not self.subject_id:
            raise ValidationError("subject_id must be non-empty")
        if self.visit_index < 0:
            raise ValidationError("visit_index must be >= 0")
        for name in ("diagnoses", "procedures", "medications"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))
        if (
            self.source_kind is SourceKind.STRUCTURED
            and self.note_text is not None
            and not (self.diagnoses or self.procedures or self.medications)
        ):
            raise ValidationError(
                "structured record with note_text must carry at least one mention list"
            )

    @property
    def mention_lists(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        return (
            ("diagnoses", self.diagnoses),
            ("procedures", self.procedures),
            ("medications", self.medications),
        )

    @classmethod
    def from_json(cls, obj: dict) -> "SubjectRecord":
        try:
            return cls(
                record_id=obj["record_id"],
                subject_id=obj["subject_id"],
                visit_index=int(obj["visit_index"]),
                timestamp=obj.get("timestamp", ""),
                source_kind=SourceKind.parse(obj.get("source_kind", "structured")),
                diagnoses=tuple(obj.get("diagnoses", ())),
                procedures=tuple(obj.get("procedures", ())),
                medications=tuple(obj.get("medications", ())),
                note_text=obj.get("note_text"),
            )
        except KeyError as exc:
            raise ValidationError(f"record is missing required field {exc.args[0]!r}") from None

    def to_json(self) -> dict:
        out = {
            "record_id": self.record_id,
            "subject_id": self.subject_id,
            "visit_index": self.visit_index,
            "timestamp": self.timestamp,
            "source_kind": self.source_kind.value,
            "diagnoses": list(self.diagnoses),
            "procedures": list(self.procedures),
            "medications": list(self.medications),
        }
        if self.note_text is not None:
            out["note_text"] = self.note_text
        return out


def load_records_jsonl(path: str | Path) -> list[SubjectRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON ({exc})") from None
            records.append(SubjectRecord.from_json(obj))
    return records
