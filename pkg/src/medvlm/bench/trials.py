"""Patient-trial eligibility benchmark construction.

Each judged (patient, trial) pair becomes one multiple-choice instance:
the patient note segmented into numbered sentences, a structured trial
prompt, and four fixed eligibility options shuffled per instance. The
"not enough information" option is a distractor and never the gold label.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DataError
from .schema import BenchmarkInstance, QrelRecord, TrialDoc
from .shuffle import shuffle_options
from .textproc import clean_criteria, segment_sentences

ELIGIBILITY_OPTIONS = (
    "eligible",
    "partially eligible",
    "not eligible",
    "not enough information",
)

_GRADE_LABELS = {2: "eligible", 1: "partially eligible", 0: "not eligible"}

NOT_PROVIDED = "Not provided"


def map_qrel_to_label(grade: int) -> str:
    if grade not in _GRADE_LABELS:
        raise DataError(f"invalid relevance grade {grade!r}; expected 0, 1 or 2")
    return _GRADE_LABELS[grade]


def _field_text(value: str | list[str]) -> str:
    if isinstance(value, list):
        return ", ".join(v for v in value if v) or NOT_PROVIDED
    return value.strip() or NOT_PROVIDED


def build_trial_prompt(trial: TrialDoc) -> str:
    """Render a trial document with fixed field order, byte-deterministic."""
    trial.validate()
    inclusion = clean_criteria(trial.inclusion)
    exclusion = clean_criteria(trial.exclusion)
    lines = [
        f"Title: {trial.title.strip() or NOT_PROVIDED}",
        f"Diseases: {_field_text(trial.diseases)}",
        f"Interventions: {_field_text(trial.interventions)}",
        f"Summary: {_field_text(trial.summary)}",
        f"Inclusion: {'; '.join(inclusion) or NOT_PROVIDED}",
        f"Exclusion: {'; '.join(exclusion) or NOT_PROVIDED}",
    ]
    return "\n".join(lines)


def render_note(note: str) -> str:
    return "\n".join(f"{sid}. {sent}" for sid, sent in segment_sentences(note))


ELIGIBILITY_QUERY = ("Based on the patient note, is this patient eligible "
                     "for the clinical trial?")


@dataclass
class BuildReport:
    skipped: list[dict[str, str]] = field(default_factory=list)

    def add(self, qrel: QrelRecord, reason: str) -> None:
        self.skipped.append({"patient_id": qrel.patient_id,
                             "trial_id": qrel.trial_id,
                             "grade": str(qrel.grade),
                             "reason": reason})

    def to_dict(self) -> dict:
        return {"skipped": self.skipped, "n_skipped": len(self.skipped)}


def build_patient_trial_bench(notes: dict[str, str], trials: dict[str, TrialDoc],
                              qrels: list[QrelRecord], seed: int,
                              ) -> tuple[list[BenchmarkInstance], BuildReport]:
    report = BuildReport()
    instances: list[BenchmarkInstance] = []
    for q in qrels:
        if q.grade not in _GRADE_LABELS:
            report.add(q, f"invalid grade {q.grade}")
            continue
        note = notes.get(q.patient_id)
        if note is None:
            report.add(q, "unknown patient id")
            continue
        trial = trials.get(q.trial_id)
        if trial is None:
            report.add(q, "unknown trial id")
            continue
        instance_id = f"pt-{q.patient_id}-{q.trial_id}"
        question = (
            "Patient note:\n" + render_note(note)
            + "\n\nClinical trial:\n" + build_trial_prompt(trial)
            + "\n\n" + ELIGIBILITY_QUERY
        )
        base = [(chr(ord("A") + i), t) for i, t in enumerate(ELIGIBILITY_OPTIONS)]
        gold_text = map_qrel_to_label(q.grade)
        base_key = next(k for k, t in base if t == gold_text)
        options, answer_key = shuffle_options(base, base_key, instance_id, seed)
        instances.append(BenchmarkInstance(
            id=instance_id, dataset="patient-trial", question=question,
            options=options, answer_key=answer_key,
            meta={"patient_id": q.patient_id, "trial_id": q.trial_id,
                  "grade": str(q.grade)},
        ).validate())
    return instances, report
