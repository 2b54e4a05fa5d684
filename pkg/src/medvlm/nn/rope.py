"""Rotary position embeddings with NTK-by-parts long-context scaling.

Frequencies follow inv_freq[i] = theta ** (-2i / head_dim). For a context
scale s > 1, each frequency is blended between the interpolated value
(inv/s) and the original value using a per-dimension ramp driven by how
many full rotations that dimension completes inside the original context
window. A scale of exactly 1 must reproduce vanilla RoPE bit for bit, so
that case returns the base frequencies untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .autograd import Tensor, concat


@dataclass(frozen=True)
class RopeConfig:
    head_dim: int
    theta_base: float = 150000.0
    original_context: int = 4096
    scale: float = 1.0
    beta_fast: float = 32.0
    beta_slow: float = 1.0

    def validate(self) -> "RopeConfig":
        if self.head_dim <= 0 or self.head_dim % 2 != 0:
            raise ConfigError(f"head_dim must be a positive even integer, got {self.head_dim}")
        if self.theta_base <= 1.0:
            raise ConfigError(f"theta_base must be > 1, got {self.theta_base}")
        if self.original_context <= 0:
            raise ConfigError(f"original_context must be positive, got {self.original_context}")
        if self.scale < 1.0:
            raise ConfigError(f"scale must be >= 1, got {self.scale}")
        if self.beta_fast <= self.beta_slow:
            raise ConfigError("beta_fast must exceed beta_slow")
        return self

    @property
    def extended_context(self) -> int:
        return int(round(self.original_context * self.scale))


def base_frequencies(head_dim: int, theta_base: float) -> np.ndarray:
    i = np.arange(head_dim // 2, dtype=np.float64)
    return theta_base ** (-2.0 * i / head_dim)


def rope_frequencies(cfg: RopeConfig) -> np.ndarray:
    """Per-dimension angular frequencies after context scaling."""
    cfg.validate()
    inv = base_frequencies(cfg.head_dim, cfg.theta_base)
    if cfg.scale == 1.0:
        return inv
    wavelength = 2.0 * math.pi / inv
    rotations = cfg.original_context / wavelength
    ramp = np.clip((rotations - cfg.beta_slow) / (cfg.beta_fast - cfg.beta_slow), 0.0, 1.0)
    return (inv / cfg.scale) * (1.0 - ramp) + inv * ramp


def yarn_temperature(scale: float) -> float:
    """Attention logit multiplier compensating for context interpolation."""
    if scale <= 1.0:
        return 1.0
    return 0.1 * math.log(scale) + 1.0


def rope_angles(positions: np.ndarray, inv_freq: np.ndarray) -> np.ndarray:
    """Outer product of positions and frequencies: (T, head_dim // 2)."""
    positions = np.asarray(positions, dtype=np.float64)
    return positions[:, None] * inv_freq[None, :]


def apply_rope(x: Tensor, angles: np.ndarray) -> Tensor:
    """Rotate feature pairs of x (..., T, head_dim) by the given angles.

    Pairs follow the split-halves convention: dimension i rotates with
    dimension i + head_dim // 2. The backward pass is a rotation by the
    negated angles, implemented directly instead of via the tape.
    """
    d = x.shape[-1]
    if d % 2 != 0:
        raise ConfigError("apply_rope requires an even last dimension")
    half = d // 2
    if angles.shape != (x.shape[-2], half):
        raise ConfigError(
            f"angles shape {angles.shape} does not match (seq={x.shape[-2]}, half={half})")
    cos = np.cos(angles).astype(x.dtype)
    sin = np.sin(angles).astype(x.dtype)
    x1 = x[..., :half]
    x2 = x[..., half:]
    c = Tensor(cos)
    s = Tensor(sin)
    out1 = x1 * c - x2 * s
    out2 = x1 * s + x2 * c
    return concat([out1, out2], axis=-1)
