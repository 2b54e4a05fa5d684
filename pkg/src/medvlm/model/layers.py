"""Transformer building blocks shared by the vision encoder and decoder."""

from __future__ import annotations

import numpy as np

from ..nn import Tensor, attention, gelu, layer_norm, linear
from ..nn.rope import apply_rope


def multi_head_attention(x: Tensor, p: dict[str, Tensor], prefix: str,
                         n_heads: int, mask: np.ndarray | None = None,
                         angles: np.ndarray | None = None,
                         temperature: float = 1.0) -> Tensor:
    """Self-attention over (batch, seq, d_model) with optional RoPE."""
    b, t, d = x.shape
    head_dim = d // n_heads

    def split(h: Tensor) -> Tensor:
        return h.reshape(b, t, n_heads, head_dim).transpose(0, 2, 1, 3)

    q = split(x @ p[prefix + ".wq"])
    k = split(x @ p[prefix + ".wk"])
    v = split(x @ p[prefix + ".wv"])
    if angles is not None:
        q = apply_rope(q, angles)
        k = apply_rope(k, angles)
    out = attention(q, k, v, mask=mask, temperature=temperature)
    out = out.transpose(0, 2, 1, 3).reshape(b, t, d)
    return out @ p[prefix + ".wo"]


def mlp(x: Tensor, p: dict[str, Tensor], prefix: str) -> Tensor:
    h = gelu(linear(x, p[prefix + ".w1"], p[prefix + ".b1"]))
    return linear(h, p[prefix + ".w2"], p[prefix + ".b2"])


def block(x: Tensor, p: dict[str, Tensor], prefix: str, n_heads: int,
          mask: np.ndarray | None = None, angles: np.ndarray | None = None,
          temperature: float = 1.0) -> Tensor:
    """Pre-norm transformer block: attention residual then MLP residual."""
    h = layer_norm(x, p[prefix + ".ln1.g"], p[prefix + ".ln1.b"])
    x = x + multi_head_attention(h, p, prefix + ".attn", n_heads,
                                 mask=mask, angles=angles, temperature=temperature)
    h = layer_norm(x, p[prefix + ".ln2.g"], p[prefix + ".ln2.b"])
    return x + mlp(h, p, prefix + ".mlp")
