"""Numerical core: tape autograd, attention math, RoPE scaling, AdamW."""

from .autograd import Tensor, concat, no_grad
from .functional import (
    attention,
    causal_mask,
    cross_entropy,
    gelu,
    layer_norm,
    linear,
    log_softmax,
    softmax,
)
from .optim import AdamWState, adamw_step, cosine_lr
from .rope import RopeConfig, apply_rope, rope_angles, rope_frequencies, yarn_temperature

__all__ = [
    "Tensor",
    "concat",
    "no_grad",
    "attention",
    "causal_mask",
    "cross_entropy",
    "gelu",
    "layer_norm",
    "linear",
    "log_softmax",
    "softmax",
    "AdamWState",
    "adamw_step",
    "cosine_lr",
    "RopeConfig",
    "apply_rope",
    "rope_angles",
    "rope_frequencies",
    "yarn_temperature",
]
