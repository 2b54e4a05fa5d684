"""BLEU-4 with clipped counts and brevity penalty, no smoothing."""

from __future__ import annotations

import math
import re
from collections import Counter

_TOKEN = re.compile(r"[a-z0-9]+")

MAX_ORDER = 4


def tokenize_for_bleu(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu4(pred: str, ref: str) -> float:
    """Geometric mean of clipped 1..4-gram precisions times brevity penalty.

    Orders with no candidate n-grams (prediction shorter than n) are dropped
    and the uniform weights renormalized over the rest; an order with
    candidates but zero matches makes the whole score 0.
    """
    pred_toks = tokenize_for_bleu(pred)
    ref_toks = tokenize_for_bleu(ref)
    if not pred_toks:
        return 0.0
    log_precisions: list[float] = []
    for n in range(1, MAX_ORDER + 1):
        pred_grams = _ngrams(pred_toks, n)
        total = sum(pred_grams.values())
        if total == 0:
            continue
        ref_grams = _ngrams(ref_toks, n)
        clipped = sum(min(c, ref_grams[g]) for g, c in pred_grams.items())
        if clipped == 0:
            return 0.0
        log_precisions.append(math.log(clipped / total))
    if not log_precisions:
        return 0.0
    geo = math.exp(sum(log_precisions) / len(log_precisions))
    if len(pred_toks) < len(ref_toks):
        bp = math.exp(1.0 - len(ref_toks) / len(pred_toks))
    else:
        bp = 1.0
    return bp * geo
