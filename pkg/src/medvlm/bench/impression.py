"""Impression-generation benchmark: study images paired with reference text.

Studies and reports are inner-joined on the study id; studies with a
missing impression or an unreadable image file are excluded. With
shots=1, each instance embeds one exemplar drawn deterministically from
the other included studies, never itself.
"""

from __future__ import annotations

import logging
from pathlib import Path

from ..errors import ConfigError
from ..rng import KeyedRng
from .schema import BenchmarkInstance

log = logging.getLogger(__name__)

IMPRESSION_PROMPT = "Write the impression section for this imaging study."


def _mk_instance(study_id: str, image_path: str, impression: str) -> BenchmarkInstance:
    return BenchmarkInstance(
        id=f"imp-{study_id}", dataset="impression",
        question=f"<image>\n{IMPRESSION_PROMPT}",
        images=[image_path],
        meta={"study_id": study_id, "reference": impression},
    )


def build_impression_bench(studies: list[dict], reports: list[dict],
                           shots: int, seed: int) -> list[BenchmarkInstance]:
    """studies: {study_id, image_path}; reports: {study_id, impression}."""
    if shots not in (0, 1):
        raise ConfigError(f"shots must be 0 or 1, got {shots}")
    impressions = {r["study_id"]: (r.get("impression") or "").strip() for r in reports}
    included: list[tuple[str, str, str]] = []
    for s in studies:
        sid = s["study_id"]
        text = impressions.get(sid, "")
        if not text:
            log.info("excluding study %s: missing impression", sid)
            continue
        image_path = s.get("image_path") or ""
        if not image_path or not Path(image_path).is_file():
            log.info("excluding study %s: image file unavailable", sid)
            continue
        included.append((sid, image_path, text))

    instances = [_mk_instance(sid, img, text) for sid, img, text in included]
    if shots == 1 and len(instances) > 1:
        by_pos = {inst.meta["study_id"]: i for i, inst in enumerate(instances)}
        for inst in instances:
            sid = inst.meta["study_id"]
            others = [s for s, _, _ in included if s != sid]
            pick = KeyedRng(seed, "shot", sid).choice(others)
            src = instances[by_pos[pick]]
            exemplar = _mk_instance(src.meta["study_id"], src.images[0],
                                    src.meta["reference"])
            inst.shots = [exemplar]
    return [i.validate() for i in instances]
