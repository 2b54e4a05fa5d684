"""Procedural training corpora.

Three tiny synthetic distributions, one per stage: image captioning for
projector alignment, templated text reports for language modeling, and
image question answering for instruction tuning. Every sample is a pure
function of (corpus name, seed, index), so corpora never need to be
stored: their content digest is reproducible on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..rng import KeyedRng
from ..util import sha256_hex

COLORS = {
    "red": (220, 40, 40),
    "green": (40, 200, 40),
    "blue": (40, 80, 220),
    "yellow": (230, 220, 40),
}
SHAPES = ("circle", "square", "cross")
BACKGROUND = (40, 40, 40)

ORGANS = ("heart", "lung", "bone", "liver")
STATES = ("normal", "enlarged", "clear", "dense")
VERDICTS = ("normal study", "follow up advised")

CORPORA = ("synth-captions-v1", "synth-reports-v1", "synth-vqa-v1")


@dataclass
class Sample:
    prompt: str
    target: str
    images: list[np.ndarray] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def draw_shape(color: str, shape: str, rng: KeyedRng, size: int = 56) -> np.ndarray:
    """Render one colored shape on a dark background."""
    img = np.empty((size, size, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    jitter = size // 8
    cy = size // 2 + rng.randbelow(2 * jitter + 1) - jitter
    cx = size // 2 + rng.randbelow(2 * jitter + 1) - jitter
    r = size // 4 + rng.randbelow(size // 8 + 1)
    yy, xx = np.mgrid[0:size, 0:size]
    if shape == "circle":
        mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    elif shape == "square":
        mask = (np.abs(yy - cy) <= r) & (np.abs(xx - cx) <= r)
    elif shape == "cross":
        band = max(2, r // 3)
        inside = (np.abs(yy - cy) <= r) & (np.abs(xx - cx) <= r)
        mask = inside & ((np.abs(yy - cy) <= band) | (np.abs(xx - cx) <= band))
    else:
        raise ConfigError(f"unknown shape {shape!r}")
    img[mask] = COLORS[color]
    return img


def _caption_sample(seed: int, i: int) -> Sample:
    # prompt ends at the image so caption tokens sit directly on
    # projector-controlled positions; stage 0 trains only the projector
    rng = KeyedRng(seed, "synth-captions-v1", str(i))
    color = rng.choice(sorted(COLORS))
    shape = rng.choice(SHAPES)
    img = draw_shape(color, shape, rng.child("img"))
    return Sample(prompt="<image>", target=f"{color} {shape}",
                  images=[img], meta={"color": color, "shape": shape})


def _report_sample(seed: int, i: int) -> Sample:
    rng = KeyedRng(seed, "synth-reports-v1", str(i))
    organ = rng.choice(ORGANS)
    state = rng.choice(STATES)
    verdict = rng.choice(VERDICTS)
    text = f"findings: {organ} {state}. impression: {verdict}."
    return Sample(prompt="", target=text, meta={"organ": organ})


def _vqa_sample(seed: int, i: int) -> Sample:
    rng = KeyedRng(seed, "synth-vqa-v1", str(i))
    color = rng.choice(sorted(COLORS))
    shape = rng.choice(SHAPES)
    img = draw_shape(color, shape, rng.child("img"))
    if rng.randbelow(2) == 0:
        q, a = "color", color
    else:
        q, a = "shape", shape
    return Sample(prompt=f"user: <image>\nwhat {q}?\nassistant:", target=f" {a}",
                  images=[img], meta={"color": color, "shape": shape, "asked": q})


_BUILDERS = {
    "synth-captions-v1": _caption_sample,
    "synth-reports-v1": _report_sample,
    "synth-vqa-v1": _vqa_sample,
}


def build_corpus(name: str, seed: int, size: int) -> list[Sample]:
    if name not in _BUILDERS:
        raise ConfigError(f"unknown corpus {name!r}; expected one of {sorted(_BUILDERS)}")
    if size <= 0:
        raise ConfigError("corpus size must be positive")
    fn = _BUILDERS[name]
    return [fn(seed, i) for i in range(size)]


def corpus_digest(samples: list[Sample]) -> str:
    """Stable content hash covering text and raw image bytes."""
    import hashlib

    h = hashlib.sha256()
    for s in samples:
        h.update(s.prompt.encode("utf-8"))
        h.update(b"\x1e")
        h.update(s.target.encode("utf-8"))
        h.update(b"\x1e")
        for im in s.images:
            h.update(sha256_hex(im.tobytes()).encode("ascii"))
        h.update(b"\x1d")
    return h.hexdigest()
