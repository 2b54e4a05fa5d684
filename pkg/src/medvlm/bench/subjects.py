"""Subject-based aggregation of multiple-choice records."""

from __future__ import annotations

import logging

from .schema import BenchmarkInstance

log = logging.getLogger(__name__)

# medical subject allowlists used to carve the med slices out of the
# general-domain exam suites
MMLU_MED_SUBJECTS = (
    "anatomy",
    "clinical knowledge",
    "college biology",
    "college medicine",
    "medical genetics",
    "nutrition",
    "professional medicine",
)

MMMU_MED_SUBJECTS = (
    "basic medical science",
    "clinical medicine",
    "diagnostics and laboratory medicine",
    "pharmacy",
    "public health",
)


def aggregate_subjects(records: list[BenchmarkInstance],
                       subject_allowlist: tuple[str, ...] | list[str]) -> list[BenchmarkInstance]:
    """Keep records whose subject is allowlisted, preserving input order."""
    allow = set(subject_allowlist)
    out = [r for r in records if r.subject in allow]
    if not out:
        log.warning("subject aggregation produced an empty benchmark "
                    "(%d records, %d allowed subjects)", len(records), len(allow))
    return out
