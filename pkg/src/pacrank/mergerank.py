"""Noisy merge sort.

Rankings are lists of element ids in ascending strength: weakest first.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .duel import _check_eps_delta, compare
from .oracle import Oracle, PreferenceModel


def seq_error(seq: Sequence[int], model: PreferenceModel) -> float:
    """Largest advantage an earlier item holds over a later one.

    ``max_{i<j} p(seq[i], seq[j]) - 1/2``; a sequence is an eps-ranking
    exactly when this is ``<= eps``.  Sequences of length <= 1 score 0.
    """
    if len(seq) <= 1:
        return 0.0
    idx = np.asarray(seq) - 1
    sub = model.matrix()[np.ix_(idx, idx)]
    return float(sub[np.triu_indices(len(seq), 1)].max() - 0.5)


def merge(S1: Sequence[int], S2: Sequence[int], eps: float, delta: float, oracle: Oracle) -> list[int]:
    """Merge two ascending sequences, emitting the loser of each head-to-head."""
    _check_eps_delta(eps, delta)
    out: list[int] = []
    i = j = 0
    while i < len(S1) and j < len(S2):
        a, b = S1[i], S2[j]
        if compare(a, b, eps, delta, oracle) == a:
            out.append(b)
            j += 1
        else:
            out.append(a)
            i += 1
    out.extend(S1[i:])
    out.extend(S2[j:])
    return out


def merge_rank(S: Sequence[int], eps: float, delta: float, oracle: Oracle) -> list[int]:
    """Merge sort with ``compare`` at the same ``(eps, delta)`` on every level.

    The left half is ``S[:len(S)//2]``.  Left, right and merge draw from
    child streams 0, 1 and 2.
    """
    _check_eps_delta(eps, delta)
    S = list(S)
    if len(S) <= 1:
        return S
    half = len(S) // 2
    left = merge_rank(S[:half], eps, delta, oracle.spawn(0))
    right = merge_rank(S[half:], eps, delta, oracle.spawn(1))
    return merge(left, right, eps, delta, oracle.spawn(2))


def rank3(S: Sequence[int], eps: float, delta: float, oracle: Oracle) -> list[int]:
    """``eps``-ranking with probability ``>= 1 - delta``.

    Runs ``merge_rank`` at bias ``eps / log2|S|`` and confidence
    ``delta / |S|^2``.
    """
    _check_eps_delta(eps, delta)
    S = list(S)
    if len(S) < 2:
        raise ValueError(f"rank3 needs at least 2 elements, got {len(S)}")
    n = len(S)
    return merge_rank(S, eps / math.log2(n), delta / n**2, oracle)
