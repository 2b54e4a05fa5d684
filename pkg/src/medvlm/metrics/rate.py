"""Embedding-similarity entity F1 with a hard polarity gate."""

from __future__ import annotations

import hashlib
import logging
from typing import Protocol, Sequence

import numpy as np

from medvlm.metrics.entities import Entity

log = logging.getLogger(__name__)

DEFAULT_TAU = 0.5


class Embedder(Protocol):
    def embed(self, text: str) -> np.ndarray: ...


class TrigramHashEmbedder:
    """Character trigrams hashed into a fixed-width L2-normalized vector.

    Deterministic across platforms (sha256, not Python hash), so similarity
    scores are reproducible without shipping model weights.
    """

    def __init__(self, dim: int = 128):
        if dim < 2:
            raise ValueError("embedding dim must be >= 2")
        self.dim = dim

    def _grams(self, text: str) -> list[str]:
        if len(text) < 3:
            return [text] if text else []
        return [text[i:i + 3] for i in range(len(text) - 2)]

    def embed(self, text: str) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.float64)
        for gram in self._grams(text):
            h = hashlib.sha256(gram.encode("utf-8")).digest()
            idx = int.from_bytes(h[:4], "little") % self.dim
            sign = 1.0 if h[4] & 1 else -1.0
            v[idx] += sign
        norm = float(np.linalg.norm(v))
        if norm > 0.0:
            v /= norm
        return v


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def _soft_scores(side: Sequence[Entity], other: Sequence[Entity],
                 embedder: Embedder, tau: float) -> list[float]:
    other_vecs = [embedder.embed(e.text) for e in other]
    scores: list[float] = []
    for ent in side:
        v = embedder.embed(ent.text)
        if float(np.linalg.norm(v)) == 0.0:
            log.warning("zero-vector embedding for entity %r; scored 0", ent.text)
            scores.append(0.0)
            continue
        best = 0.0
        for o, ov in zip(other, other_vecs):
            if o.polarity != ent.polarity:
                continue
            best = max(best, _cosine(v, ov))
        scores.append(best if best >= tau else 0.0)
    return scores


def rate_similarity_f1(pred: Sequence[Entity], ref: Sequence[Entity],
                       embedder: Embedder | None = None,
                       tau: float = DEFAULT_TAU) -> float:
    """Soft precision/recall from best same-polarity cosine, gated at tau."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    if not pred and not ref:
        return 1.0
    if not pred or not ref:
        return 0.0
    emb = embedder if embedder is not None else TrigramHashEmbedder()
    precision = float(np.mean(_soft_scores(pred, ref, emb, tau)))
    recall = float(np.mean(_soft_scores(ref, pred, emb, tau)))
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)
