"""Benchmark record types and their line-delimited JSON serialization."""

from __future__ import annotations

import string
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import DataError
from ..util import read_jsonl, write_jsonl

OPTION_KEYS = tuple(string.ascii_uppercase[:10])  # A..J


@dataclass
class BenchmarkInstance:
    """One evaluation item: multiple-choice (answer_key set) or generation."""

    id: str
    dataset: str
    question: str
    options: list[tuple[str, str]] = field(default_factory=list)
    answer_key: str = ""
    subject: str | None = None
    images: list[str] = field(default_factory=list)
    shots: list["BenchmarkInstance"] = field(default_factory=list)
    meta: dict[str, str] = field(default_factory=dict)

    def validate(self) -> "BenchmarkInstance":
        if not self.id:
            raise DataError("instance id must be non-empty")
        keys = [k for k, _ in self.options]
        if keys != list(OPTION_KEYS[:len(keys)]):
            raise DataError(
                f"instance {self.id}: option keys must be contiguous from A, got {keys}")
        if self.answer_key and self.answer_key not in keys:
            raise DataError(
                f"instance {self.id}: answer_key {self.answer_key!r} not among {keys}")
        for shot in self.shots:
            if shot.id == self.id:
                raise DataError(f"instance {self.id}: shot references the instance itself")
        if not all(isinstance(k, str) and isinstance(v, str)
                   for k, v in self.meta.items()):
            raise DataError(f"instance {self.id}: meta must be a string map")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["options"] = [[k, t] for k, t in self.options]
        d["shots"] = [s.to_dict() for s in self.shots]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkInstance":
        try:
            return cls(
                id=d["id"], dataset=d["dataset"], question=d["question"],
                options=[(k, t) for k, t in d.get("options", [])],
                answer_key=d.get("answer_key", ""),
                subject=d.get("subject"),
                images=list(d.get("images", [])),
                shots=[cls.from_dict(s) for s in d.get("shots", [])],
                meta=dict(d.get("meta", {})),
            ).validate()
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"malformed benchmark instance: {e}") from e

    @property
    def is_generation(self) -> bool:
        return not self.options


@dataclass(frozen=True)
class QrelRecord:
    patient_id: str
    trial_id: str
    grade: int


@dataclass(frozen=True)
class TrialDoc:
    trial_id: str
    title: str = ""
    diseases: list[str] = field(default_factory=list)
    interventions: list[str] = field(default_factory=list)
    summary: str = ""
    inclusion: str = ""
    exclusion: str = ""

    def validate(self) -> "TrialDoc":
        if not self.trial_id:
            raise DataError("trial_id must be non-empty")
        return self


def save_bench(path: str | Path, instances: list[BenchmarkInstance]) -> None:
    write_jsonl(path, [i.validate().to_dict() for i in instances])


def load_bench(path: str | Path) -> list[BenchmarkInstance]:
    return [BenchmarkInstance.from_dict(d) for d in read_jsonl(path)]
