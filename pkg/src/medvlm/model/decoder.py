"""Causal decoder over pre-assembled embeddings, with rotary positions."""

from __future__ import annotations

import numpy as np

from ..nn import Tensor, causal_mask, layer_norm
from ..nn.rope import RopeConfig, rope_angles, rope_frequencies, yarn_temperature
from .config import DecoderConfig
from .layers import block


def rope_setup(cfg: DecoderConfig, seq_len: int) -> tuple[np.ndarray, float]:
    rc = RopeConfig(head_dim=cfg.head_dim, theta_base=cfg.rope_theta,
                    original_context=cfg.rope_original_context,
                    scale=cfg.rope_scale)
    angles = rope_angles(np.arange(seq_len), rope_frequencies(rc))
    return angles, yarn_temperature(cfg.rope_scale)


def decoder_forward(p: dict[str, Tensor], embeds: Tensor, cfg: DecoderConfig) -> Tensor:
    """(batch, seq, d_model) embeddings -> (batch, seq, vocab) logits."""
    _, t, _ = embeds.shape
    angles, temperature = rope_setup(cfg, t)
    mask = causal_mask(t, dtype=embeds.dtype)
    h = embeds
    for i in range(cfg.n_layers):
        h = block(h, p, f"lm.blocks.{i}", cfg.n_heads,
                  mask=mask, angles=angles, temperature=temperature)
    h = layer_norm(h, p["lm.ln_f.g"], p["lm.ln_f.b"])
    logits = h @ p["lm.head.w"]
    if cfg.logit_scale != 1.0:
        logits = logits * cfg.logit_scale
    return logits


def embed_tokens(p: dict[str, Tensor], ids: np.ndarray) -> Tensor:
    return p["lm.tok_embed"][np.asarray(ids, dtype=np.int64)]
