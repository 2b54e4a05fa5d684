"""Composite layers built from autograd primitives."""

from __future__ import annotations

import math

import numpy as np

from .autograd import Tensor

# Additive mask value for disallowed attention positions. exp(-1e9) underflows
# to exactly 0.0 in both float32 and float64, so masked positions get zero
# probability without producing NaNs.
MASK_VALUE = -1e9


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    z = x - x.max_detached(axis=axis, keepdims=True)
    e = z.exp()
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(x: Tensor, axis: int = -1) -> Tensor:
    z = x - x.max_detached(axis=axis, keepdims=True)
    return z - z.exp().sum(axis=axis, keepdims=True).log()


def causal_mask(seq_len: int, dtype=np.float32) -> np.ndarray:
    """(seq, seq) additive mask: 0 on and below the diagonal, MASK_VALUE above."""
    mask = np.full((seq_len, seq_len), MASK_VALUE, dtype=dtype)
    return np.triu(mask, k=1)


def attention(q: Tensor, k: Tensor, v: Tensor,
              mask: np.ndarray | None = None,
              temperature: float = 1.0) -> Tensor:
    """Scaled dot-product attention over (..., seq, head_dim) inputs.

    Logits are temperature * q @ k^T / sqrt(head_dim), plus an optional
    additive mask broadcast over leading axes.
    """
    head_dim = q.shape[-1]
    scale = temperature / math.sqrt(head_dim)
    logits = (q @ k.swapaxes(-1, -2)) * scale
    if mask is not None:
        logits = logits + Tensor(np.asarray(mask, dtype=logits.dtype))
    return softmax(logits, axis=-1) @ v


def linear(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """x @ weight (+ bias); weight is stored (in_features, out_features)."""
    out = x @ weight
    if bias is not None:
        out = out + bias
    return out


def gelu(x: Tensor) -> Tensor:
    """Tanh approximation of the Gaussian error linear unit."""
    c = math.sqrt(2.0 / math.pi)
    inner = (x + x * x * x * 0.044715) * c
    return x * (inner.tanh() + 1.0) * 0.5


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    mu = x.mean(axis=-1, keepdims=True)
    centered = x - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    return centered / (var + eps).sqrt() * gamma + beta


def cross_entropy(logits: Tensor, targets: np.ndarray,
                  ignore_index: int = -100) -> Tensor:
    """Mean token-level negative log-likelihood.

    logits: (..., vocab); targets: integer array matching the leading shape.
    Positions equal to ignore_index contribute nothing to the mean.
    """
    vocab = logits.shape[-1]
    flat_logits = logits.reshape(-1, vocab)
    flat_targets = np.asarray(targets).reshape(-1)
    keep = flat_targets != ignore_index
    if not keep.any():
        raise ValueError("cross_entropy: every target position is ignored")
    kept_logits = flat_logits[np.nonzero(keep)[0]]
    kept_targets = flat_targets[keep]
    logp = log_softmax(kept_logits, axis=-1)
    picked = logp[np.arange(kept_targets.shape[0]), kept_targets]
    return -picked.mean()
