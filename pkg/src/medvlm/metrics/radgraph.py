"""Entity-graph partial-credit F1 with optimal one-to-one assignment."""

from __future__ import annotations

import numpy as np

from medvlm.metrics.entities import Entity, EntityGraph

PARTIAL_CREDIT = 0.5
# Largest side size for which the exact bitmask assignment is used.
EXACT_ASSIGN_LIMIT = 12


def entity_match_credit(pred: Entity, ref: Entity) -> float:
    """1 for a full (text, label, polarity) match, 0.5 for text-only, else 0."""
    if pred.text != ref.text:
        return 0.0
    if pred.label == ref.label and pred.polarity == ref.polarity:
        return 1.0
    return PARTIAL_CREDIT


def _credit_matrix(pred: EntityGraph, ref: EntityGraph) -> np.ndarray:
    m = np.zeros((len(pred.entities), len(ref.entities)), dtype=np.float64)
    for i, p in enumerate(pred.entities):
        for j, r in enumerate(ref.entities):
            m[i, j] = entity_match_credit(p, r)
    return m


def _assign_exact(credit: np.ndarray) -> float:
    """Max-weight assignment by DP over subsets of the smaller side."""
    if credit.shape[0] < credit.shape[1]:
        credit = credit.T
    m, n = credit.shape
    size = 1 << n
    dp = np.zeros(size, dtype=np.float64)
    # per column j: indices of all masks with bit j clear
    without = [np.flatnonzero((np.arange(size) & (1 << j)) == 0) for j in range(n)]
    for i in range(m):
        ndp = dp.copy()
        for j in range(n):
            idx = without[j]
            np.maximum.at(ndp, idx | (1 << j), dp[idx] + credit[i, j])
        dp = ndp
    return float(dp.max())


def _assign_greedy(credit: np.ndarray) -> float:
    """Highest credit first, ties broken by (pred index, ref index)."""
    m, n = credit.shape
    pairs = [(-credit[i, j], i, j) for i in range(m) for j in range(n) if credit[i, j] > 0.0]
    pairs.sort()
    used_p = [False] * m
    used_r = [False] * n
    total = 0.0
    for neg, i, j in pairs:
        if not used_p[i] and not used_r[j]:
            used_p[i] = True
            used_r[j] = True
            total -= neg
    return total


def radgraph_partial_f1(pred: EntityGraph, ref: EntityGraph) -> float:
    n_pred = len(pred.entities)
    n_ref = len(ref.entities)
    if n_pred == 0 and n_ref == 0:
        return 1.0
    if n_pred == 0 or n_ref == 0:
        return 0.0
    credit = _credit_matrix(pred, ref)
    if min(n_pred, n_ref) <= EXACT_ASSIGN_LIMIT:
        total = _assign_exact(credit)
    else:
        total = _assign_greedy(credit)
    precision = total / n_pred
    recall = total / n_ref
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)
