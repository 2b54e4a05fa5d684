"""Parsers for the raw input formats the builders consume.

Inputs are plain files: whitespace-delimited qrels (TREC style, with an
optional iteration column), JSONL trial documents, JSONL patient notes,
and JSONL study/report tables sharing a study-id column.
"""

from __future__ import annotations

from pathlib import Path

from ..errors import DataError
from ..util import read_jsonl
from .schema import BenchmarkInstance, QrelRecord, TrialDoc


def read_qrels(path: str | Path) -> list[QrelRecord]:
    """Lines of 'patient_id [iteration] trial_id grade'; grade not validated here."""
    out: list[QrelRecord] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) == 4:
            patient, _, trial, grade = parts
        elif len(parts) == 3:
            patient, trial, grade = parts
        else:
            raise DataError(f"{path}:{lineno}: expected 3 or 4 columns, got {len(parts)}")
        try:
            g = int(grade)
        except ValueError as e:
            raise DataError(f"{path}:{lineno}: grade must be an integer: {e}") from e
        out.append(QrelRecord(patient_id=patient, trial_id=trial, grade=g))
    return out


def read_notes(path: str | Path) -> dict[str, str]:
    """JSONL rows {patient_id, note}."""
    notes: dict[str, str] = {}
    for row in read_jsonl(path):
        try:
            notes[row["patient_id"]] = row["note"]
        except (KeyError, TypeError) as e:
            raise DataError(f"bad note row in {path}: {e}") from e
    return notes


def read_trials(path: str | Path) -> dict[str, TrialDoc]:
    trials: dict[str, TrialDoc] = {}
    for row in read_jsonl(path):
        try:
            doc = TrialDoc(
                trial_id=row["trial_id"], title=row.get("title", ""),
                diseases=list(row.get("diseases", [])),
                interventions=list(row.get("interventions", [])),
                summary=row.get("summary", ""),
                inclusion=row.get("inclusion", ""),
                exclusion=row.get("exclusion", ""),
            ).validate()
        except (KeyError, TypeError) as e:
            raise DataError(f"bad trial row in {path}: {e}") from e
        trials[doc.trial_id] = doc
    return trials


def read_table(path: str | Path, required: tuple[str, ...]) -> list[dict]:
    """JSONL table; every row must carry the required columns."""
    rows = read_jsonl(path)
    for i, row in enumerate(rows):
        missing = [c for c in required if c not in row]
        if missing:
            raise DataError(f"{path}: row {i} missing columns {missing}")
    return rows


def read_mc_records(path: str | Path) -> list[BenchmarkInstance]:
    """Unified-schema multiple-choice records (one BenchmarkInstance per line)."""
    return [BenchmarkInstance.from_dict(d) for d in read_jsonl(path)]
