import numpy as np
import pytest

from medvlm.curriculum import build_corpus, corpus_digest
from medvlm.curriculum.data import COLORS, SHAPES, draw_shape
from medvlm.errors import ConfigError
from medvlm.rng import KeyedRng


def test_build_corpus_deterministic():
    a = build_corpus("synth-captions-v1", seed=7, size=20)
    b = build_corpus("synth-captions-v1", seed=7, size=20)
    assert corpus_digest(a) == corpus_digest(b)


def test_build_corpus_seed_sensitive():
    a = build_corpus("synth-captions-v1", seed=7, size=20)
    b = build_corpus("synth-captions-v1", seed=8, size=20)
    assert corpus_digest(a) != corpus_digest(b)


def test_unknown_corpus_rejected():
    with pytest.raises(ConfigError):
        build_corpus("nope", seed=0, size=4)
    with pytest.raises(ConfigError):
        build_corpus("synth-captions-v1", seed=0, size=0)


def test_caption_samples_shape_and_text():
    for s in build_corpus("synth-captions-v1", seed=0, size=12):
        assert s.prompt == "<image>"
        color, shape = s.target.split(" ", 1)
        assert color in COLORS and shape in SHAPES
        assert len(s.images) == 1
        img = s.images[0]
        assert img.shape == (56, 56, 3) and img.dtype == np.uint8


def test_report_samples_text_only():
    for s in build_corpus("synth-reports-v1", seed=0, size=12):
        assert s.images == []
        assert s.target.startswith("findings: ")
        assert "impression: " in s.target


def test_vqa_answer_matches_image_attributes():
    for s in build_corpus("synth-vqa-v1", seed=3, size=20):
        if s.meta["asked"] == "color":
            assert s.target == f" {s.meta['color']}"
        else:
            assert s.target == f" {s.meta['shape']}"
        assert f"what {s.meta['asked']}?" in s.prompt
        assert len(s.images) == 1


def test_draw_shape_renders_foreground():
    rng = KeyedRng(0, "t")
    img = draw_shape("red", "circle", rng)
    # some pixels are the fill color, the rest background
    red = (img == np.array([220, 40, 40], dtype=np.uint8)).all(axis=-1)
    assert 0 < red.sum() < img.shape[0] * img.shape[1]


def test_draw_shape_distinct_shapes():
    rng = KeyedRng(1, "t")
    imgs = {s: draw_shape("blue", s, KeyedRng(1, "t", s)).tobytes() for s in SHAPES}
    assert len(set(imgs.values())) == 3
