"""Binary-search ranking.

Rank a random subset of anchors, drop every other element into the bin
between two consecutive anchors with a noisy random walk over an interval
tree, then rank the few elements far from both anchors of each bin.

Anchor indices are 1-based positions in ``S_prime``, the ranked anchors
framed by a bottom dummy at index 1 and a top dummy at the last index.
Bin ``k`` lies between ``S_prime[k]`` and ``S_prime[k + 1]``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .duel import compare2
from .mergerank import rank3
from .oracle import Oracle

RankX = Callable[[Sequence[int], float, float, Oracle], list]

# child-stream keys
_ANCHORS, _RANK_ANCHORS, _BINNING, _CLASSIFY, _RANK_BINS = range(5)


@dataclass(eq=False)
class IntervalNode:
    alpha1: int
    alpha2: int
    parent: "IntervalNode | None" = None
    left: "IntervalNode | None" = None
    right: "IntervalNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.alpha2 - self.alpha1 <= 1

    @property
    def mid(self) -> int:
        return (self.alpha1 + self.alpha2 + 1) // 2

    def leaves(self) -> list["IntervalNode"]:
        if self.is_leaf:
            return [self]
        return self.left.leaves() + self.right.leaves()

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def __repr__(self) -> str:
        return f"IntervalNode({self.alpha1}, {self.alpha2})"


def build_tree(m: int) -> IntervalNode:
    """Interval tree over anchors ``1..m``; leaves are ``(k, k+1)``."""
    if m < 2:
        raise ValueError(f"need at least 2 anchors, got {m}")

    def grow(node: IntervalNode) -> IntervalNode:
        if not node.is_leaf:
            mid = node.mid
            node.left = grow(IntervalNode(node.alpha1, mid, parent=node))
            node.right = grow(IntervalNode(mid, node.alpha2, parent=node))
        return node

    return grow(IntervalNode(1, m))


def _log_n(n: int) -> int:
    return max(1, math.ceil(math.log(n)))


@dataclass
class WalkState:
    current: IntervalNode
    c: int = 0
    Q: set = field(default_factory=set)
    steps: int = 0
    threshold: int = 0

    @property
    def accepted(self) -> bool:
        return self.c > self.threshold


def random_walk(
    S_prime: Sequence[int],
    e: int,
    eps: float,
    oracle: Oracle,
    n: int | None = None,
    tree: IntervalNode | None = None,
) -> WalkState:
    """The ``30 ceil(ln n)``-step backtracking walk, without the fallback.

    Every duel batch has ``ceil(10 / eps^2)`` comparisons.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    n = n if n is not None else len(S_prime)
    L = _log_n(n)
    K = math.ceil(10.0 / (eps * eps))
    root = tree if tree is not None else build_tree(len(S_prime))
    st = WalkState(root, steps=30 * L, threshold=10 * L)

    def beats(a: int, b: int) -> bool:
        return compare2(a, b, K, oracle) > 0.5

    node = root
    for _ in range(st.steps):
        a1, a2 = S_prime[node.alpha1 - 1], S_prime[node.alpha2 - 1]
        if not node.is_leaf:
            st.Q.update((node.alpha1, node.alpha2, node.mid))
            if beats(a1, e) or beats(e, a2):
                node = node.parent or node
            elif beats(S_prime[node.mid - 1], e):
                node = node.left
            else:
                node = node.right
        elif beats(e, a1) and beats(a2, e):
            st.c += 1
        elif st.c == 0:
            node = node.parent or node
        else:
            st.c -= 1
    st.current = node
    return st


def binary_search(
    S_prime: Sequence[int],
    Q: Sequence[int],
    e: int,
    eps: float,
    oracle: Oracle,
    n: int | None = None,
) -> int:
    """Search the ascending anchor indices ``Q`` for one close to ``e``.

    Returns the first probed anchor whose empirical win rate against ``e``
    lands in ``[1/2 - 3 eps, 1/2 + 3 eps]``.  An anchor that clearly beats
    ``e`` sends the search to weaker anchors, one that clearly loses sends
    it to stronger ones.
    """
    Q = list(Q)
    if not Q:
        raise ValueError("Q must be non-empty")
    n = n if n is not None else len(S_prime)
    K = math.ceil(10.0 * math.log(max(n, 2)) / (eps * eps))
    lo, hi = 0, len(Q) - 1
    while hi - lo > 0:
        mid = (lo + hi + 1) // 2
        t = compare2(e, S_prime[Q[mid] - 1], K, oracle)
        if 0.5 - 3 * eps <= t <= 0.5 + 3 * eps:
            return Q[mid]
        if t < 0.5 - 3 * eps:
            hi = mid - 1
        else:
            lo = mid
    return Q[hi]


def interval_binary_search(
    S_prime: Sequence[int],
    e: int,
    eps: float,
    oracle: Oracle,
    n: int | None = None,
    tree: IntervalNode | None = None,
) -> int:
    """Bin index ``k`` for ``e``: ``S_prime[k] <~ e <~ S_prime[k + 1]``."""
    m = len(S_prime)
    if m < 2:
        raise ValueError("S_prime needs at least the two dummies")
    if m == 2:
        return 1
    st = random_walk(S_prime, e, eps, oracle, n=n, tree=tree)
    if st.accepted:
        return st.current.alpha1
    k = binary_search(S_prime, sorted(st.Q), e, 2 * eps, oracle, n=n)
    # the top dummy has no bin of its own
    return min(k, m - 1)


@dataclass
class BsrState:
    S_prime: list
    eps_prime: float
    eps_dprime: float
    x: float
    bins: dict = field(default_factory=dict)
    near: dict = field(default_factory=dict)
    far: dict = field(default_factory=dict)
    fallback: bool = False
    output: list = field(default_factory=list)

    def partition_ok(self, elements: Sequence[int]) -> bool:
        """Every non-anchor lands in exactly one near- or far-set."""
        anchors = set(self.S_prime[1:-1])
        placed = [e for d in (self.near, self.far) for s in d.values() for e in s]
        rest = [e for e in elements if e not in anchors]
        return len(placed) == len(set(placed)) and sorted(placed) == sorted(rest)


def anchor_count(n: int, x: float) -> int:
    if n < 2:
        return 0
    return int(n // math.log2(n) ** x)


def _map(fn, items, n_jobs):
    if n_jobs and n_jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def binary_search_ranking(
    S: Sequence[int],
    eps: float,
    oracle: Oracle,
    rankx: RankX = rank3,
    x: float = 3,
    n_anchors: int | None = None,
    n_jobs: int | None = None,
    return_state: bool = False,
):
    """``eps``-ranking of ``S`` (weakest first) with probability ``>= 1 - 1/n``.

    ``rankx(S, eps, delta, oracle)`` must return an ``eps``-ranking with
    probability ``>= 1 - delta``.  ``n_anchors`` overrides the
    ``floor(n / log2(n)^x)`` anchor count; with fewer than two anchors the
    whole set is handed to ``rankx`` directly.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    S = list(S)
    n = len(S)
    if len(set(S)) != n:
        raise ValueError("elements must be distinct")
    eps1, eps2 = eps / 16.0, eps / 15.0
    n_a = anchor_count(n, x) if n_anchors is None else int(n_anchors)
    if n_anchors is not None and not 2 <= n_a <= n:
        raise ValueError(f"anchor override must lie in [2, {n}], got {n_anchors}")

    if n_a < 2:
        out = list(S) if n < 2 else rankx(S, eps, 1.0 / n, oracle.spawn(_RANK_ANCHORS, phase="fallback"))
        state = BsrState([], eps1, eps2, x, fallback=True, output=out)
        return (out, state) if return_state else out

    picked = oracle.spawn(_ANCHORS).rng.choice(n, size=n_a, replace=False)
    chosen = set(int(k) for k in picked)
    anchors = [S[k] for k in sorted(chosen)]
    rest = [e for k, e in enumerate(S) if k not in chosen]
    ranked = rankx(anchors, eps1, 1.0 / n**6, oracle.spawn(_RANK_ANCHORS, phase="anchors"))

    a, b = oracle.dummy_ids(2)
    ctx = oracle.with_dummies(bottom=[a], top=[b])
    S_prime = [a, *ranked, b]
    m = len(S_prime)
    tree = build_tree(m)

    def place(item):
        k, e = item
        sub = ctx.spawn(_BINNING, k, phase="binning")
        return interval_binary_search(S_prime, e, eps2, sub, n=n, tree=tree)

    where = _map(place, list(enumerate(rest)), n_jobs)
    n_bins = m - 1
    bins = {j: [] for j in range(1, n_bins + 1)}
    for e, k in zip(rest, where):
        bins[k].append(e)

    K5 = math.ceil(10.0 * math.log(n) / (eps2 * eps2))
    lo, hi = 0.5 - 6 * eps2, 0.5 + 6 * eps2

    def classify(j):
        sub = ctx.spawn(_CLASSIFY, j, phase="classify")
        here, nxt, far = [], [], []
        for e in bins[j]:
            if lo <= compare2(e, S_prime[j - 1], K5, sub) <= hi:
                here.append(e)
            elif lo <= compare2(e, S_prime[j], K5, sub) <= hi:
                nxt.append(e)
            else:
                far.append(e)
        return here, nxt, far

    near = {j: [] for j in range(1, n_bins + 2)}
    far = {}
    for j, (here, nxt, fj) in zip(bins, _map(classify, list(bins), n_jobs)):
        near[j].extend(here)
        near[j + 1].extend(nxt)
        far[j] = fj

    def rank_bin(j):
        if len(far[j]) < 2:
            return list(far[j])
        return rankx(far[j], eps2, 1.0 / n**4, ctx.spawn(_RANK_BINS, j, phase="bins"))

    far = dict(zip(far, _map(rank_bin, list(far), n_jobs)))

    out = []
    for j in range(1, n_bins + 1):
        out.append(S_prime[j - 1])
        out.extend(near[j])
        out.extend(far[j])
    out = [e for e in out if not ctx.is_dummy(e)]
    state = BsrState(S_prime, eps1, eps2, x, bins, near, far, output=out)
    return (out, state) if return_state else out
