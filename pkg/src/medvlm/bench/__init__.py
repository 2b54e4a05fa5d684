"""Deterministic benchmark construction from raw corpora."""

from .impression import build_impression_bench
from .overlap import check_overlap, normalize_text
from .schema import BenchmarkInstance, QrelRecord, TrialDoc, load_bench, save_bench
from .shuffle import shuffle_options
from .subjects import MMLU_MED_SUBJECTS, MMMU_MED_SUBJECTS, aggregate_subjects
from .textproc import clean_criteria, segment_sentences
from .trials import build_patient_trial_bench, build_trial_prompt, map_qrel_to_label

__all__ = [
    "build_impression_bench",
    "check_overlap",
    "normalize_text",
    "BenchmarkInstance",
    "QrelRecord",
    "TrialDoc",
    "load_bench",
    "save_bench",
    "shuffle_options",
    "MMLU_MED_SUBJECTS",
    "MMMU_MED_SUBJECTS",
    "aggregate_subjects",
    "clean_criteria",
    "segment_sentences",
    "build_patient_trial_bench",
    "build_trial_prompt",
    "map_qrel_to_label",
]
