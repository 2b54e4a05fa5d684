"""Corpus-level metric computation over paired report records.

Records are line-delimited {report_id, text?, entities?} objects.  Graph
metrics use the entities field when present and otherwise fall back to
the demo lexicon extractor on the text field.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

from medvlm.errors import ConfigError, DataError
from medvlm.metrics.bleu import bleu4
from medvlm.metrics.composite import CompositeConfig, radcliq_composite, reciprocal_mean
from medvlm.metrics.entities import EntityGraph, extract_entities
from medvlm.metrics.radgraph import radgraph_partial_f1
from medvlm.metrics.rate import rate_similarity_f1
from medvlm.util import read_jsonl

METRIC_NAMES = ("radgraph", "rate", "bleu", "radcliq")


def read_report_records(path: str | Path) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for i, rec in enumerate(read_jsonl(path), start=1):
        rid = rec.get("report_id")
        if not isinstance(rid, str) or not rid:
            raise DataError(f"{path}:{i}: missing or empty report_id")
        if rid in out:
            raise DataError(f"{path}:{i}: duplicate report_id {rid!r}")
        out[rid] = rec
    return out


def _graph_of(rec: Mapping, where: str) -> EntityGraph:
    if "entities" in rec:
        return EntityGraph.from_dict(rec)
    text = rec.get("text")
    if not isinstance(text, str):
        raise DataError(f"{where}: record needs either entities or text")
    return extract_entities(text)


def _text_of(rec: Mapping, where: str) -> str:
    text = rec.get("text")
    if not isinstance(text, str):
        raise DataError(f"{where}: record needs a text field")
    return text


def _score_one(metric: str, pred: Mapping, ref: Mapping, rid: str,
               composite_cfg: CompositeConfig) -> float:
    if metric == "radgraph":
        return radgraph_partial_f1(_graph_of(pred, rid), _graph_of(ref, rid))
    if metric == "rate":
        return rate_similarity_f1(_graph_of(pred, rid).entities,
                                  _graph_of(ref, rid).entities)
    if metric == "bleu":
        return bleu4(_text_of(pred, rid), _text_of(ref, rid))
    if metric == "radcliq":
        g = radgraph_partial_f1(_graph_of(pred, rid), _graph_of(ref, rid))
        b = bleu4(_text_of(pred, rid), _text_of(ref, rid))
        return radcliq_composite(g, b, composite_cfg)
    raise ConfigError(f"unknown metric {metric!r}; expected one of {METRIC_NAMES}")


def score_report_corpus(pred: Mapping[str, Mapping], ref: Mapping[str, Mapping],
                        metric: str,
                        composite_cfg: CompositeConfig | None = None) -> dict:
    """Deterministic fold over reports in reference order; ids must match."""
    if metric not in METRIC_NAMES:
        raise ConfigError(f"unknown metric {metric!r}; expected one of {METRIC_NAMES}")
    missing = [rid for rid in ref if rid not in pred]
    extra = [rid for rid in pred if rid not in ref]
    if missing or extra:
        raise DataError(
            f"pred/ref report ids differ (missing {sorted(missing)[:5]}, "
            f"extra {sorted(extra)[:5]})")
    if not ref:
        raise DataError("no reports to score")
    cfg = composite_cfg if composite_cfg is not None else CompositeConfig()
    per_report = [
        {"report_id": rid, "score": _score_one(metric, pred[rid], ref[rid], rid, cfg)}
        for rid in ref
    ]
    scores = [r["score"] for r in per_report]
    result: dict = {
        "metric": metric,
        "n": len(scores),
        "mean": sum(scores) / len(scores),
        "per_report": per_report,
    }
    if metric == "radcliq":
        result["composite_weights"] = {"w0": cfg.w0, "w1": cfg.w1, "w2": cfg.w2}
        mean = result["mean"]
        result["reciprocal_mean"] = reciprocal_mean(scores) if mean > 0 else None
    return result
