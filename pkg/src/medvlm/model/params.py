"""Parameter construction and module grouping.

Parameters live in a flat dict keyed by dotted names. The first dotted
component is the module: "vision", "projector" or "lm"; stage freezing
and per-module learning rates key off that prefix. Initialization is
keyed per tensor name, so adding or reordering tensors never shifts the
init of existing ones.
"""

from __future__ import annotations

import numpy as np

from ..rng import KeyedRng
from .config import ModelConfig

MODULES = ("vision", "projector", "lm")
INIT_STD = 0.02


def module_of(name: str) -> str:
    return name.split(".", 1)[0]


def init_params(cfg: ModelConfig, seed: int) -> dict[str, np.ndarray]:
    cfg.validate()
    v, d = cfg.vision, cfg.decoder
    shapes: dict[str, tuple[int, ...]] = {}

    shapes["vision.patch_embed.w"] = (v.patch_dim, v.d_model)
    shapes["vision.patch_embed.b"] = (v.d_model,)
    shapes["vision.pos_embed"] = (v.n_patches, v.d_model)
    for i in range(v.n_layers):
        b = f"vision.blocks.{i}"
        shapes[f"{b}.ln1.g"] = (v.d_model,)
        shapes[f"{b}.ln1.b"] = (v.d_model,)
        shapes[f"{b}.ln2.g"] = (v.d_model,)
        shapes[f"{b}.ln2.b"] = (v.d_model,)
        for w in ("wq", "wk", "wv", "wo"):
            shapes[f"{b}.attn.{w}"] = (v.d_model, v.d_model)
        shapes[f"{b}.mlp.w1"] = (v.d_model, v.d_ff)
        shapes[f"{b}.mlp.b1"] = (v.d_ff,)
        shapes[f"{b}.mlp.w2"] = (v.d_ff, v.d_model)
        shapes[f"{b}.mlp.b2"] = (v.d_model,)
    shapes["vision.ln_f.g"] = (v.d_model,)
    shapes["vision.ln_f.b"] = (v.d_model,)

    merged_dim = 4 * v.d_model  # 2x2 spatial merge concatenates four patches
    shapes["projector.w1"] = (merged_dim, cfg.projector_hidden)
    shapes["projector.b1"] = (cfg.projector_hidden,)
    shapes["projector.w2"] = (cfg.projector_hidden, d.d_model)
    shapes["projector.b2"] = (d.d_model,)

    shapes["lm.tok_embed"] = (d.vocab_size, d.d_model)
    for i in range(d.n_layers):
        b = f"lm.blocks.{i}"
        shapes[f"{b}.ln1.g"] = (d.d_model,)
        shapes[f"{b}.ln1.b"] = (d.d_model,)
        shapes[f"{b}.ln2.g"] = (d.d_model,)
        shapes[f"{b}.ln2.b"] = (d.d_model,)
        for w in ("wq", "wk", "wv", "wo"):
            shapes[f"{b}.attn.{w}"] = (d.d_model, d.d_model)
        shapes[f"{b}.mlp.w1"] = (d.d_model, d.d_ff)
        shapes[f"{b}.mlp.b1"] = (d.d_ff,)
        shapes[f"{b}.mlp.w2"] = (d.d_ff, d.d_model)
        shapes[f"{b}.mlp.b2"] = (d.d_model,)
    shapes["lm.ln_f.g"] = (d.d_model,)
    shapes["lm.ln_f.b"] = (d.d_model,)
    shapes["lm.head.w"] = (d.d_model, d.vocab_size)

    params: dict[str, np.ndarray] = {}
    for name, shape in shapes.items():
        leaf = name.rsplit(".", 1)[-1]
        if leaf in ("g",):
            params[name] = np.ones(shape, dtype=np.float32)
        elif leaf in ("b", "b1", "b2") and name != "vision.pos_embed":
            params[name] = np.zeros(shape, dtype=np.float32)
        else:
            params[name] = KeyedRng(seed, "init", name).truncated_normal(
                shape, std=INIT_STD, clip=2.0, dtype=np.float32)
    return params


def param_count(params: dict[str, np.ndarray], module: str | None = None) -> int:
    return sum(p.size for n, p in params.items()
               if module is None or module_of(n) == module)
