"""Per-instance deterministic option shuffling.

The permutation is drawn from a counter-based generator keyed by
(seed, instance_id), so a benchmark build is order-independent and two
builds on any platform produce the same shuffle for the same instance.
"""

from __future__ import annotations

from ..errors import DataError
from ..rng import KeyedRng
from .schema import OPTION_KEYS


def shuffle_options(options: list[tuple[str, str]], answer_key: str,
                    instance_id: str, seed: int) -> tuple[list[tuple[str, str]], str]:
    """Permute option texts, re-key A.., and track the gold key."""
    keys = [k for k, _ in options]
    texts = [t for _, t in options]
    if answer_key not in keys:
        raise DataError(f"answer_key {answer_key!r} not among option keys {keys}")
    if len(options) > len(OPTION_KEYS):
        raise DataError(f"too many options: {len(options)} (max {len(OPTION_KEYS)})")
    gold_idx = keys.index(answer_key)
    perm = KeyedRng(seed, instance_id).permutation(len(options))
    new_options = [(OPTION_KEYS[i], texts[p]) for i, p in enumerate(perm)]
    new_key = OPTION_KEYS[perm.index(gold_idx)]
    return new_options, new_key
