"""AdamW with decoupled weight decay, plus the warmup-cosine LR schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError


@dataclass
class AdamWState:
    """First/second moment buffers and the step counter for one parameter."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros_like(cls, param: np.ndarray) -> "AdamWState":
        return cls(m=np.zeros_like(param), v=np.zeros_like(param))


def adamw_step(param: np.ndarray, grad: np.ndarray, state: AdamWState,
               lr: float, beta1: float = 0.9, beta2: float = 0.999,
               eps: float = 1e-8, weight_decay: float = 0.0) -> None:
    """One in-place AdamW update.

    Weight decay is decoupled and applied multiplicatively before the
    moment update: with zero grad the parameter shrinks by exactly
    (1 - lr * weight_decay) per step.
    """
    state.step += 1
    if weight_decay != 0.0:
        param *= 1.0 - lr * weight_decay
    state.m *= beta1
    state.m += (1.0 - beta1) * grad
    state.v *= beta2
    state.v += (1.0 - beta2) * np.square(grad)
    m_hat = state.m / (1.0 - beta1 ** state.step)
    v_hat = state.v / (1.0 - beta2 ** state.step)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)


def cosine_lr(step: int, total_steps: int, base_lr: float,
              warmup_steps: int = 0, min_lr: float = 0.0) -> float:
    """Learning rate at a given step: linear warmup then cosine decay.

    Warmup runs over [0, warmup_steps); the rate at step == warmup_steps is
    exactly base_lr, and it decays to min_lr at step == total_steps.
    """
    if total_steps <= 0:
        raise ConfigError("total_steps must be positive")
    if not 0 <= warmup_steps < total_steps:
        raise ConfigError("warmup_steps must lie in [0, total_steps)")
    if step < warmup_steps:
        return base_lr * step / warmup_steps
    span = total_steps - warmup_steps
    progress = min(max((step - warmup_steps) / span, 0.0), 1.0)
    return min_lr + 0.5 * (base_lr - min_lr) * (1.0 + math.cos(math.pi * progress))


@dataclass
class ParamGroup:
    """Named parameter dict with per-array optimizer state."""

    params: dict[str, np.ndarray]
    states: dict[str, AdamWState] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, p in self.params.items():
            if name not in self.states:
                self.states[name] = AdamWState.zeros_like(p)

    def step(self, grads: dict[str, np.ndarray], lr: float,
             beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
             weight_decay: float = 0.0) -> None:
        for name in sorted(self.params):
            g = grads.get(name)
            if g is None:
                continue
            adamw_step(self.params[name], g.astype(self.params[name].dtype),
                       self.states[name], lr, beta1, beta2, eps, weight_decay)
