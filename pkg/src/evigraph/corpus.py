"""Synthetic longitudinal record corpus with controlled noise injection.

Stands in for restricted clinical datasets. Positive-outcome subjects carry a
severe condition re-asserted at every visit (so its triples score high);
noise is injected as stale free-text mentions of severe conditions and as
category-confused list entries (a medication filed under diagnoses), both
bounded so every injected triple scores below the 0.8 threshold.
"""

from __future__ import annotations

import datetime
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .dictionary import ConceptDictionary
from .errors import ValidationError
from .model import visit_node_id
from .records import SourceKind, SubjectRecord

#: Chronic conditions re-asserted on every visit, with their usual medication.
CHRONIC_CONDITIONS = {
    "D_HTN": "M_LISIN",
    "D_T2DM": "M_METF",
    "D_AFIB": "M_WARF",
    "D_CHF": "M_FURO",
    "D_COPD": "M_ALBU",
    "D_ASTHMA": "M_ALBU",
    "D_CKD": "M_FURO",
    "D_HLD": "M_ATORV",
    "D_GERD": "M_OMEP",
}

#: Severe conditions; their presence correlates with the positive outcome.
RISK_CONCEPTS = ("D_SEPSIS", "D_ARREST", "D_RESPFAIL", "D_STROKE", "D_MI")

ONE_OFF_DIAGNOSES = ("D_UTI", "D_PNA", "D_ANEMIA", "D_OSTEO")
ONE_OFF_PROCEDURES = ("P_ECHO", "P_CXR", "P_EKG", "P_LAB", "P_COLON")
ONE_OFF_MEDICATIONS = ("M_AMOX", "M_IBU", "M_PRED")

POSITIVE_RATE = 0.35
#: A noise pattern may recur at most this often per subject; more repetitions
#: would push the injected triple past the filtering threshold.
NOISE_REPEAT_CAP = 2


@dataclass
class Corpus:
    records: list[SubjectRecord]
    labels: dict[str, int]
    risk_concepts: tuple[str, ...]
    planted_keys: dict[str, list[str]]
    noise_keys: dict[str, list[str]]
    seed: int
    noise_rate: float
    visits_per_subject: int

    @property
    def subject_ids(self) -> list[str]:
        return sorted(self.labels)

    def labels_json(self) -> dict:
        return {
            "schema_version": 1,
            "seed": self.seed,
            "noise_rate": self.noise_rate,
            "visits_per_subject": self.visits_per_subject,
            "labels": self.labels,
            "risk_concepts": list(self.risk_concepts),
            "planted_keys": self.planted_keys,
            "noise_keys": self.noise_keys,
        }


def _surface(rng: random.Random, dictionary: ConceptDictionary, concept_id: str) -> str:
    entity = dictionary.entity(concept_id)
    if entity is None:
        raise ValidationError(f"corpus concept {concept_id!r} missing from dictionary")
    return rng.choice(entity.surface_forms)


def generate_corpus(
    seed: int,
    n_subjects: int,
    visits_per_subject: int,
    noise_rate: float,
    dictionary: ConceptDictionary | None = None,
    out_dir: str | Path | None = None,
) -> Corpus:
    """Deterministic from the seed; optionally writes records.jsonl + labels.json."""
    if n_subjects < 1 or visits_per_subject < 1:
        raise ValidationError("n_subjects and visits_per_subject must be positive")
    if not 0.0 <= noise_rate <= 1.0:
        raise ValidationError("noise_rate outside [0, 1]")
    if dictionary is None:
        from .config import fixture_path

        dictionary = ConceptDictionary.from_file(fixture_path("concepts.json"))

    rng = random.Random(seed)
    n_positive = max(1, math.ceil(POSITIVE_RATE * n_subjects)) if n_subjects > 1 else 1
    positive_slots = set(rng.sample(range(n_subjects), n_positive)) if n_subjects > 1 else {0}

    records: list[SubjectRecord] = []
    labels: dict[str, int] = {}
    planted_keys: dict[str, list[str]] = {}
    noise_keys: dict[str, list[str]] = {}
    base_date = datetime.date(2024, 1, 1)

    for i in range(n_subjects):
        subject_id = f"subj-{i:03d}"
        label = int(i in positive_slots)
        labels[subject_id] = label
        planted_keys[subject_id] = []
        noise_keys[subject_id] = []

        chronic = rng.sample(sorted(CHRONIC_CONDITIONS), k=rng.randint(1, 2))
        chronic_meds = sorted({CHRONIC_CONDITIONS[d] for d in chronic})
        risk_concept = rng.choice(RISK_CONCEPTS) if label else None
        noise_pattern_counts: dict[str, int] = {}

        for v in range(visits_per_subject):
            visit = visit_node_id(subject_id, v)
            diagnoses = [_surface(rng, dictionary, d) for d in chronic]
            medications = [_surface(rng, dictionary, m) for m in chronic_meds]
            procedures: list[str] = []
            notes: list[str] = []

            if risk_concept is not None:
                diagnoses.append(_surface(rng, dictionary, risk_concept))
                planted_keys[subject_id].append(f"{visit}|diagnosed_with|{risk_concept}")

            if rng.random() < 0.5:
                bucket = rng.randrange(3)
                if bucket == 0:
                    diagnoses.append(_surface(rng, dictionary, rng.choice(ONE_OFF_DIAGNOSES)))
                elif bucket == 1:
                    procedures.append(_surface(rng, dictionary, rng.choice(ONE_OFF_PROCEDURES)))
                else:
                    medications.append(_surface(rng, dictionary, rng.choice(ONE_OFF_MEDICATIONS)))
            if rng.random() < 0.3:
                med = rng.choice(chronic_meds)
                notes.append(f"continues {_surface(rng, dictionary, med)} without issues")

            stale = v < visits_per_subject - 1
            if stale and rng.random() < noise_rate:
                if rng.random() < 0.6:
                    # Stale free-text mentions of severe conditions.
                    mentioned = []
                    for concept in rng.sample(RISK_CONCEPTS, k=rng.randint(2, 3)):
                        pattern = f"mentioned|{concept}"
                        if noise_pattern_counts.get(pattern, 0) >= NOISE_REPEAT_CAP:
                            continue
                        noise_pattern_counts[pattern] = noise_pattern_counts.get(pattern, 0) + 1
                        mentioned.append(concept)
                    if mentioned:
                        phrases = ", ".join(_surface(rng, dictionary, c) for c in mentioned)
                        notes.append(f"family history and prior concern for {phrases}")
                        noise_keys[subject_id].extend(
                            f"{visit}|mentioned|{c}" for c in mentioned
                        )
                else:
                    # Category confusion: a medication filed under diagnoses.
                    med = rng.choice(chronic_meds)
                    pattern = f"diagnosed_with|{med}"
                    if noise_pattern_counts.get(pattern, 0) < NOISE_REPEAT_CAP:
                        noise_pattern_counts[pattern] = noise_pattern_counts.get(pattern, 0) + 1
                        diagnoses.append(_surface(rng, dictionary, med))
                        noise_keys[subject_id].append(f"{visit}|diagnosed_with|{med}")

            timestamp = (base_date + datetime.timedelta(days=30 * v)).isoformat() + "T09:00:00Z"
            records.append(
                SubjectRecord(
                    record_id=f"{subject_id}-v{v}",
                    subject_id=subject_id,
                    visit_index=v,
                    timestamp=timestamp,
                    source_kind=SourceKind.STRUCTURED,
                    diagnoses=tuple(diagnoses),
                    procedures=tuple(procedures),
                    medications=tuple(medications),
                    note_text=". ".join(notes) if notes else None,
                )
            )

    corpus = Corpus(
        records=records,
        labels=labels,
        risk_concepts=RISK_CONCEPTS,
        planted_keys=planted_keys,
        noise_keys=noise_keys,
        seed=seed,
        noise_rate=noise_rate,
        visits_per_subject=visits_per_subject,
    )
    if out_dir is not None:
        write_corpus(corpus, out_dir)
    return corpus


def write_corpus(corpus: Corpus, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "records.jsonl"
    labels_path = out_dir / "labels.json"
    with open(records_path, "w", encoding="utf-8") as fh:
        for record in corpus.records:
            fh.write(json.dumps(record.to_json(), sort_keys=True, separators=(",", ":")) + "\n")
    with open(labels_path, "w", encoding="utf-8") as fh:
        json.dump(corpus.labels_json(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return records_path, labels_path


def load_labels(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if "labels" not in obj:
        raise ValidationError(f"{path}: missing 'labels' field")
    return obj
