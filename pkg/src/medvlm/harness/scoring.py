"""Eval records plus exact-match scoring and aggregation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from medvlm.bench.schema import BenchmarkInstance
from medvlm.errors import DataError


@dataclass
class EvalRecord:
    """One scored model response.

    correct holds iff extracted is non-null and equals gold; instances
    without a gold key (generation tasks) always score incorrect here and
    are reported separately.
    """

    instance_id: str
    raw_output: str
    extracted: str | None
    gold: str
    correct: bool
    latency_ms: float
    failed: bool = False
    attempts: int = 1

    def validate(self) -> "EvalRecord":
        if self.latency_ms < 0:
            raise DataError(f"record {self.instance_id}: negative latency")
        expected = self.extracted is not None and self.extracted == self.gold
        if self.correct != expected:
            raise DataError(f"record {self.instance_id}: correct flag inconsistent")
        return self

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "raw_output": self.raw_output,
            "extracted": self.extracted,
            "gold": self.gold,
            "correct": self.correct,
            "latency_ms": self.latency_ms,
            "failed": self.failed,
            "attempts": self.attempts,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "EvalRecord":
        try:
            return cls(
                instance_id=d["instance_id"],
                raw_output=d["raw_output"],
                extracted=d["extracted"],
                gold=d["gold"],
                correct=d["correct"],
                latency_ms=d["latency_ms"],
                failed=d.get("failed", False),
                attempts=d.get("attempts", 1),
            ).validate()
        except KeyError as e:
            raise DataError(f"eval record missing field {e.args[0]!r}") from e


def _pct(correct: int, total: int) -> float:
    if total == 0:
        return 0.0
    return round(100.0 * correct / total, 2)


def score_records(records: Sequence[EvalRecord],
                  instances: Sequence[BenchmarkInstance] | None = None) -> dict:
    """Accuracy as a 2-decimal percentage plus per-subject and failure counts.

    When instances are given they must be in bijection with the records;
    subjects for the breakdown come from them.
    """
    seen: set[str] = set()
    for r in records:
        if r.instance_id in seen:
            raise DataError(f"duplicate record for instance {r.instance_id!r}")
        seen.add(r.instance_id)
        r.validate()

    subject_of: dict[str, str] = {}
    if instances is not None:
        inst_ids = {i.id for i in instances}
        if inst_ids != seen:
            missing = sorted(inst_ids - seen)[:5]
            extra = sorted(seen - inst_ids)[:5]
            raise DataError(
                f"records do not match instances (missing {missing}, extra {extra})")
        subject_of = {i.id: (i.subject or "unspecified") for i in instances}

    mc = [r for r in records if r.gold]
    n_correct = sum(r.correct for r in mc)
    by_subject: dict[str, dict] = {}
    for r in mc:
        subj = subject_of.get(r.instance_id, "unspecified")
        agg = by_subject.setdefault(subj, {"n": 0, "n_correct": 0})
        agg["n"] += 1
        agg["n_correct"] += r.correct
    for agg in by_subject.values():
        agg["accuracy"] = _pct(agg["n_correct"], agg["n"])

    return {
        "n": len(records),
        "n_scored": len(mc),
        "n_correct": n_correct,
        "accuracy": _pct(n_correct, len(mc)),
        "by_subject": {k: by_subject[k] for k in sorted(by_subject)},
        "n_null_extracted": sum(1 for r in mc if r.extracted is None),
        "n_transport_failed": sum(1 for r in records if r.failed),
        "n_generation": len(records) - len(mc),
    }


def format_summary_table(summary: Mapping) -> str:
    lines = [
        f"instances        {summary['n']}",
        f"scored (MC)      {summary['n_scored']}",
        f"correct          {summary['n_correct']}",
        f"accuracy         {summary['accuracy']:.2f}%",
        f"null extractions {summary['n_null_extracted']}",
        f"transport fails  {summary['n_transport_failed']}",
    ]
    if summary["n_generation"]:
        lines.append(f"generation-only  {summary['n_generation']}")
    if summary["by_subject"]:
        lines.append("")
        lines.append(f"{'subject':<32} {'n':>5} {'acc':>8}")
        for subj, agg in summary["by_subject"].items():
            lines.append(f"{subj:<32} {agg['n']:>5} {agg['accuracy']:>7.2f}%")
    return "\n".join(lines)
