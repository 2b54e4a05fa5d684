"""Patch ViT over image tiles, with 2x2 spatial merge of the output grid."""

from __future__ import annotations

import numpy as np

from ..nn import Tensor, layer_norm, linear
from .config import VisionConfig
from .layers import block


def patchify(tiles: np.ndarray, cfg: VisionConfig) -> np.ndarray:
    """(n, tile, tile, 3) uint8 -> (n, n_patches, patch_dim) float32 in [-1, 1]."""
    n = tiles.shape[0]
    g, p = cfg.patch_grid, cfg.patch_size
    x = tiles.reshape(n, g, p, g, p, 3).transpose(0, 1, 3, 2, 4, 5)
    x = x.reshape(n, g * g, p * p * 3).astype(np.float32)
    return x / 127.5 - 1.0


def space_to_depth(h: Tensor, cfg: VisionConfig) -> Tensor:
    """Merge each 2x2 patch neighborhood by channel concatenation.

    (n, g*g, d) -> (n, (g/2)*(g/2), 4d), quartering the token count.
    """
    n, _, d = h.shape
    g = cfg.patch_grid
    h = h.reshape(n, g // 2, 2, g // 2, 2, d)
    h = h.transpose(0, 1, 3, 2, 4, 5)
    return h.reshape(n, (g // 2) * (g // 2), 4 * d)


def vision_forward(p: dict[str, Tensor], tiles: np.ndarray, cfg: VisionConfig) -> Tensor:
    """Encode tiles to merged patch features: (n_tiles, tokens_per_tile, 4*d)."""
    x = Tensor(patchify(tiles, cfg))
    h = linear(x, p["vision.patch_embed.w"], p["vision.patch_embed.b"])
    h = h + p["vision.pos_embed"]
    for i in range(cfg.n_layers):
        h = block(h, p, f"vision.blocks.{i}", cfg.n_heads)
    h = layer_norm(h, p["vision.ln_f.g"], p["vision.ln_f.b"])
    return space_to_depth(h, cfg)
