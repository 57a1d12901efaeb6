"""Adaptive ``compare`` and fixed-budget ``compare2``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracle import Oracle

_FIRST_CHUNK = 32


def _check_eps_delta(eps: float, delta: float) -> None:
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def budget(eps: float, delta: float) -> int:
    """Comparison budget ``ceil(ln(2/delta) / (2 eps^2))``."""
    _check_eps_delta(eps, delta)
    return max(1, math.ceil(math.log(2.0 / delta) / (2.0 * eps * eps)))


@dataclass(frozen=True)
class CompareParams:
    eps: float
    delta: float

    def __post_init__(self):
        _check_eps_delta(self.eps, self.delta)

    @property
    def m(self) -> int:
        return budget(self.eps, self.delta)


def confidence_radius(r, delta: float):
    """Half-width ``sqrt(ln(4 r^2 / delta) / (2 r))`` after ``r`` duels."""
    r = np.asarray(r, dtype=float)
    return np.sqrt(np.log(4.0 * r * r / delta) / (2.0 * r))


def compare(i: int, j: int, eps: float, delta: float, oracle: Oracle) -> int:
    """Duel ``i`` and ``j`` until confident or out of budget; return the winner.

    Stops after the first ``r`` with ``|w_i/r - 1/2| > c(r) - eps`` or once
    ``r`` exceeds the budget ``m``, so at most ``m + 1`` duels are used.
    Returns ``j`` when ``i`` has won at most half the duels.

    If ``p(i, j) - 1/2 >= eps`` the answer is ``i`` with probability at
    least ``1 - delta``.
    """
    _check_eps_delta(eps, delta)
    if i == j:
        raise ValueError(f"cannot compare element {i} with itself")
    m = budget(eps, delta)
    limit = m + 1
    r = 0
    wins = 0
    chunk = _FIRST_CHUNK
    # Draw outcomes in growing batches and locate the stopping time in each.
    while True:
        size = min(chunk, limit - r)
        out = oracle.outcomes(i, j, size)
        w = wins + np.cumsum(out)
        rs = np.arange(r + 1, r + size + 1)
        stop = np.abs(w / rs - 0.5) > confidence_radius(rs, delta) - eps
        stop[rs > m] = True
        hit = np.flatnonzero(stop)
        if hit.size:
            k = int(hit[0])
            oracle.charge(k + 1)
            return j if 2 * int(w[k]) <= int(rs[k]) else i
        oracle.charge(size)
        wins = int(w[-1])
        r += size
        chunk *= 2


def compare2(a: int, b: int, k: int, oracle: Oracle) -> float:
    """Fraction of ``k`` duels won by ``a`` against ``b``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return oracle.wins(a, b, int(k)) / k
