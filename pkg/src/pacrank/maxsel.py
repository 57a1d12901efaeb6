"""Knockout tournaments with geometrically tightening comparisons."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .duel import _check_eps_delta, compare
from .oracle import Oracle

C = 2.0 ** (1.0 / 3.0) - 1.0


@dataclass(frozen=True)
class KnockoutParams:
    eps: float
    delta: float
    gamma: float = 1.0

    def __post_init__(self):
        _check_eps_delta(self.eps, self.delta)
        if not self.gamma >= 1.0:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")

    def round_eps(self, i: int) -> float:
        return C * self.eps / (self.gamma * 2.0 ** (i / 3.0))

    def round_delta(self, i: int) -> float:
        return self.delta / 2.0**i


def schedule(eps: float, delta: float, gamma: float = 1.0, rounds: int = 1) -> list[tuple[float, float]]:
    """Per-round ``(bias, confidence)`` for rounds ``1..rounds``."""
    kp = KnockoutParams(eps, delta, gamma)
    return [(kp.round_eps(i), kp.round_delta(i)) for i in range(1, rounds + 1)]


def knockout_round(
    S: Sequence[int],
    eps: float,
    delta: float,
    oracle: Oracle,
    n_jobs: int | None = None,
) -> list[int]:
    """Randomly pair ``S`` and keep the winner of each pair.

    Pair ``k`` draws from ``oracle.spawn(k)`` so the result does not depend
    on ``n_jobs``.  Winners are returned in pair order.
    """
    S = list(S)
    if len(S) < 2 or len(S) % 2:
        raise ValueError(f"knockout_round needs an even set of size >= 2, got {len(S)}")
    perm = oracle.rng.permutation(len(S))
    pairs = [(S[perm[2 * k]], S[perm[2 * k + 1]]) for k in range(len(S) // 2)]

    def play(k: int) -> int:
        a, b = pairs[k]
        return compare(a, b, eps, delta, oracle.spawn(k))

    if n_jobs and n_jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(play, range(len(pairs))))
    return [play(k) for k in range(len(pairs))]


def knockout(
    S: Sequence[int],
    eps: float,
    delta: float,
    oracle: Oracle,
    gamma: float = 1.0,
    n_jobs: int | None = None,
) -> int:
    """Return an ``eps``-maximum of ``S`` with probability ``>= 1 - delta``.

    ``S`` is padded to a power of two with dummies that lose to every real
    element; round ``i`` (counted from 1) runs at bias
    ``c eps / (gamma 2^(i/3))`` and confidence ``delta / 2^i`` with
    ``c = 2^(1/3) - 1``.
    """
    kp = KnockoutParams(eps, delta, gamma)
    S = list(S)
    if not S:
        raise ValueError("knockout needs a non-empty set")
    if len(set(S)) != len(S):
        raise ValueError("elements must be distinct")
    if len(S) == 1:
        return S[0]
    size = 1 << math.ceil(math.log2(len(S)))
    dummies = oracle.dummy_ids(size - len(S))
    ctx = oracle.with_dummies(bottom=dummies) if dummies else oracle
    S = S + dummies
    i = 1
    while len(S) > 1:
        S = knockout_round(S, kp.round_eps(i), kp.round_delta(i), ctx.spawn(i), n_jobs=n_jobs)
        i += 1
    winner = S[0]
    if ctx.is_dummy(winner):  # unreachable: dummies lose with probability 1
        raise RuntimeError("knockout produced a dummy element")
    return winner
