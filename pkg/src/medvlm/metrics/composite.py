"""Composite lower-is-better report score and its corpus aggregation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class CompositeConfig:
    """Linear weights for the composite.

    The shipped defaults (0, 1, 1) are placeholders, not published
    coefficients; override them when calibrated weights are available.
    """

    w0: float = 0.0
    w1: float = 1.0
    w2: float = 1.0


def radcliq_composite(graph_f1: float, bleu: float,
                      cfg: CompositeConfig | None = None) -> float:
    """w0 + w1*(1 - graph_f1) + w2*(1 - bleu); lower is better."""
    if not 0.0 <= graph_f1 <= 1.0:
        raise ValueError(f"graph_f1 must be in [0, 1], got {graph_f1}")
    if not 0.0 <= bleu <= 1.0:
        raise ValueError(f"bleu must be in [0, 1], got {bleu}")
    c = cfg if cfg is not None else CompositeConfig()
    return c.w0 + c.w1 * (1.0 - graph_f1) + c.w2 * (1.0 - bleu)


def reciprocal_mean(scores: Sequence[float]) -> float:
    """Reciprocal of the arithmetic mean, not the mean of reciprocals."""
    if len(scores) == 0:
        raise ValueError("reciprocal_mean of empty sequence")
    mean = sum(scores) / len(scores)
    if mean <= 0.0:
        raise ValueError(f"reciprocal_mean requires positive mean, got {mean}")
    return 1.0 / mean
