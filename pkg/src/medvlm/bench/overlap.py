"""Exact-hash train/eval contamination checking.

Texts are normalized (lowercase, punctuation stripped, whitespace
collapsed) and content-hashed; eval items are flagged when their question
text or any image's raw bytes match a training item. Exact-match only by
design: near-duplicate detection is out of scope.
"""

from __future__ import annotations

import re
from pathlib import Path

from ..util import sha256_hex
from .schema import BenchmarkInstance

_PUNCT = re.compile(r"[^\w\s]")
_WS = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    return _WS.sub(" ", _PUNCT.sub("", text.lower())).strip()


def text_fingerprint(text: str) -> str:
    return sha256_hex(normalize_text(text))


def check_overlap(train_texts: list[str], eval_bench: list[BenchmarkInstance],
                  train_image_paths: list[str] | None = None) -> dict:
    """Report eval instances whose text or image bytes appear in training data."""
    train_hashes = {text_fingerprint(t) for t in train_texts}
    train_image_hashes = set()
    for p in train_image_paths or []:
        train_image_hashes.add(sha256_hex(Path(p).read_bytes()))
    overlaps: list[dict[str, str]] = []
    for inst in eval_bench:
        if text_fingerprint(inst.question) in train_hashes:
            overlaps.append({"id": inst.id, "kind": "text"})
            continue
        for img in inst.images:
            if train_image_hashes and \
                    sha256_hex(Path(img).read_bytes()) in train_image_hashes:
                overlaps.append({"id": inst.id, "kind": "image", "image": img})
                break
    return {"n_train": len(train_texts), "n_eval": len(eval_bench),
            "n_overlap": len(overlaps), "overlaps": overlaps}
