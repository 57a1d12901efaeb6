"""Ground-truth preference models and the simulated comparison oracle.

Elements are integer ids ``1..n``; element 1 is the strongest unless a model
says otherwise.  Ids above ``n`` are virtual dummy elements that the oracle
resolves on its own without consulting the model.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MATRIX_TOL = 1e-9
MAX_VERIFY_N = 2000

# dummy kinds
BOTTOM = "bottom"
TOP = "top"


class PreferenceModel:
    """Pairwise win probabilities ``p(i, j)`` over elements ``1..n``.

    Subclasses fill ``self._P`` (an ``n x n`` array, diagonal 1/2) and
    ``self.order`` (ids, strongest first).
    """

    name = "model"
    n: int
    order: tuple[int, ...]
    _P: np.ndarray

    def prob(self, i: int, j: int) -> float:
        return float(self._P[i - 1, j - 1])

    def margin(self, i: int, j: int) -> float:
        """Advantage ``p(i, j) - 1/2`` of ``i`` over ``j``."""
        return self.prob(i, j) - 0.5

    def matrix(self) -> np.ndarray:
        """Copy of the full probability matrix (0-based rows/cols)."""
        return self._P.copy()

    @property
    def best(self) -> int:
        return self.order[0]

    def rank_of(self, i: int) -> int:
        """1-based position of ``i`` in the true order, 1 = strongest."""
        return self._rank[i]

    def _finish(self, P: np.ndarray, order: Sequence[int]) -> None:
        P = np.array(P, dtype=float)
        np.fill_diagonal(P, 0.5)
        P.setflags(write=False)
        self._P = P
        self.n = P.shape[0]
        self.order = tuple(int(i) for i in order)
        self._rank = {e: r for r, e in enumerate(self.order, start=1)}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


class AdjacentGapModel(PreferenceModel):
    """``p(i, j) = p`` for every ``i < j``."""

    name = "adjacent-gap"

    def __init__(self, n: int, p: float = 0.6):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if not 0.5 <= p <= 1.0:
            raise ValueError(f"p must lie in [1/2, 1], got {p}")
        self.p = p
        idx = np.arange(n)
        P = np.where(idx[:, None] < idx[None, :], p, 1.0 - p)
        self._finish(P, range(1, n + 1))

    def __repr__(self) -> str:
        return f"AdjacentGapModel(n={self.n}, p={self.p})"


class SingleGapModel(PreferenceModel):
    """Element 1 beats everyone w.p. ``top``; the rest differ by ``ptilde``."""

    name = "single-gap"

    def __init__(self, n: int, ptilde: float, top: float = 0.6):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if not 0.0 <= ptilde <= 0.5:
            raise ValueError(f"ptilde must lie in [0, 1/2], got {ptilde}")
        if not 0.5 <= top <= 1.0:
            raise ValueError(f"top must lie in [1/2, 1], got {top}")
        self.ptilde = ptilde
        self.top = top
        idx = np.arange(n)
        upper = np.where(idx[:, None] == 0, top, 0.5 + ptilde)
        P = np.where(idx[:, None] < idx[None, :], upper, 0.0)
        P = P + np.tril(1.0 - P.T, -1)
        self._finish(P, range(1, n + 1))

    def __repr__(self) -> str:
        return f"SingleGapModel(n={self.n}, ptilde={self.ptilde})"


def _geom(j: int, phi: float) -> float:
    return math.fsum(phi**i for i in range(j))


def mallows_pairwise(phi: float, i_rank: int, j_rank: int) -> float:
    """Probability that the better-ranked of two items wins under Mallows.

    Depends only on the rank distance ``k``: ``h(k+1) - h(k)`` with
    ``h(k) = k / (1 - phi^k)``; the adjacent case is ``1 / (1 + phi)``.
    Evaluated as ``sum_{i<k} phi^i S(k-i) / (S(k) S(k+1))`` with
    ``S(j) = 1 + phi + ... + phi^(j-1)``, which avoids cancellation near
    ``phi = 1``.
    """
    if not 0.0 < phi < 1.0:
        raise ValueError(f"phi must lie in (0, 1), got {phi}")
    if i_rank == j_rank:
        raise ValueError("ranks must differ")
    k = abs(i_rank - j_rank)
    num = math.fsum(phi**i * _geom(k - i, phi) for i in range(k))
    return num / (_geom(k, phi) * _geom(k + 1, phi))


class MallowsModel(PreferenceModel):
    """Pairwise marginals of a Mallows distribution centred on ``1..n``."""

    name = "mallows"

    def __init__(self, n: int, phi: float):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if not 0.0 < phi < 1.0:
            raise ValueError(f"phi must lie in (0, 1), got {phi}")
        self.phi = phi
        P = np.full((n, n), 0.5)
        for k in range(1, n):
            q = mallows_pairwise(phi, 0, k)
            rows = np.arange(n - k)
            P[rows, rows + k] = q
            P[rows + k, rows] = 1.0 - q
        self._finish(P, range(1, n + 1))

    def __repr__(self) -> str:
        return f"MallowsModel(n={self.n}, phi={self.phi})"


class BTLModel(PreferenceModel):
    """Bradley-Terry-Luce: ``p(i, j) = w_i / (w_i + w_j)``."""

    name = "btl"

    def __init__(self, weights: Iterable[float]):
        w = np.asarray(list(weights), dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d sequence")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")
        self.weights = w
        P = w[:, None] / (w[:, None] + w[None, :])
        # stable sort keeps lower ids first among equal weights
        order = np.argsort(-w, kind="stable") + 1
        self._finish(P, order)

    @classmethod
    def from_file(cls, path: str | Path) -> "BTLModel":
        lines = Path(path).read_text().split()
        return cls(float(x) for x in lines)


class MatrixModel(PreferenceModel):
    """Explicit ``n x n`` matrix, row ``i`` column ``j`` holds ``p(i, j)``.

    The true order is by number of pairwise wins, then by total advantage,
    then by id.
    """

    name = "matrix"

    def __init__(self, P, order: Sequence[int] | None = None, tol: float = MATRIX_TOL):
        P = np.array(P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
            raise ValueError(f"matrix must be square, got shape {P.shape}")
        np.fill_diagonal(P, 0.5)
        if np.any(P < 0) or np.any(P > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        gap = np.abs(P + P.T - 1.0)
        if gap.max() > tol:
            i, j = np.unravel_index(np.argmax(gap), gap.shape)
            raise ValueError(
                f"p({i + 1},{j + 1}) + p({j + 1},{i + 1}) deviates from 1 by {gap[i, j]:.3g}"
            )
        n = P.shape[0]
        if order is None:
            wins = (P > 0.5).sum(axis=1)
            adv = (P - 0.5).sum(axis=1)
            order = sorted(range(1, n + 1), key=lambda e: (-wins[e - 1], -adv[e - 1], e))
        elif sorted(order) != list(range(1, n + 1)):
            raise ValueError("order must be a permutation of 1..n")
        self._finish(P, order)

    @classmethod
    def from_file(cls, path: str | Path) -> "MatrixModel":
        P = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(P)

    def to_file(self, path: str | Path) -> None:
        np.savetxt(path, self._P, delimiter=",", fmt="%.17g")


def make_model(spec: str, n: int | None = None) -> PreferenceModel:
    """Build a model from ``name[:param]``.

    ``adjacent-gap[:p]``, ``single-gap[:ptilde]``, ``mallows:phi``,
    ``btl:FILE`` and ``matrix:FILE``.  File-backed models take ``n`` from
    the file.
    """
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name in ("btl", "matrix"):
        if not arg:
            raise ValueError(f"model {name!r} needs a file, e.g. {name}:weights.txt")
        model = BTLModel.from_file(arg) if name == "btl" else MatrixModel.from_file(arg)
        if n is not None and n != model.n:
            raise ValueError(f"--n {n} disagrees with {model.n} elements in {arg}")
        return model
    if n is None:
        raise ValueError(f"model {name!r} needs an element count")
    if name == "adjacent-gap":
        return AdjacentGapModel(n, float(arg) if arg else 0.6)
    if name == "single-gap":
        return SingleGapModel(n, float(arg) if arg else 0.01)
    if name == "mallows":
        if not arg:
            raise ValueError("model 'mallows' needs phi, e.g. mallows:0.8")
        return MallowsModel(n, float(arg))
    raise ValueError(f"unknown model {name!r}")


class ComparisonTally:
    """Thread-safe count of oracle duels, optionally split by phase label."""

    def __init__(self):
        self.total = 0
        self.phases: dict[str, int] = {}
        self._lock = threading.Lock()

    def add(self, k: int = 1, phase: str | None = None) -> None:
        if k < 0:
            raise ValueError("tally increments must be nonnegative")
        with self._lock:
            self.total += k
            if phase is not None:
                self.phases[phase] = self.phases.get(phase, 0) + k

    def __repr__(self) -> str:
        return f"ComparisonTally(total={self.total}, phases={self.phases})"


class Oracle:
    """Simulated comparison source: a model, a random stream and a tally.

    ``spawn(*key)`` derives an independent child stream from the root seed
    and an integer key path, so work split across workers draws the same
    numbers as a serial run.  Children share the tally and the dummy table.
    """

    def __init__(
        self,
        model: PreferenceModel,
        seed: int | np.random.SeedSequence | None = None,
        tally: ComparisonTally | None = None,
        phase: str | None = None,
    ):
        self.model = model
        if isinstance(seed, np.random.SeedSequence):
            self.seed_seq = seed
        else:
            self.seed_seq = np.random.SeedSequence(seed)
        self.rng = np.random.default_rng(self.seed_seq)
        self.tally = tally if tally is not None else ComparisonTally()
        self.phase = phase
        self._P = model.matrix().tolist()
        self._dummies: dict[int, tuple[str, int]] = {}

    @property
    def n(self) -> int:
        return self.model.n

    def _derive(self, seed_seq: np.random.SeedSequence, phase: str | None) -> "Oracle":
        child = object.__new__(Oracle)
        child.model = self.model
        child.seed_seq = seed_seq
        child.rng = np.random.default_rng(seed_seq)
        child.tally = self.tally
        child.phase = phase
        child._P = self._P
        child._dummies = self._dummies
        return child

    def spawn(self, *key: int, phase: str | None = None) -> "Oracle":
        ss = self.seed_seq
        child = np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(key))
        return self._derive(child, phase if phase is not None else self.phase)

    def with_dummies(self, bottom: Iterable[int] = (), top: Iterable[int] = ()) -> "Oracle":
        """Copy sharing stream and tally, with extra dummy ids registered.

        Bottom dummies lose to every real element, top dummies beat every
        real element.  Within a kind, the lower id wins.
        """
        child = self._derive(self.seed_seq, self.phase)
        child.rng = self.rng
        table = dict(self._dummies)
        for kind, ids in ((BOTTOM, bottom), (TOP, top)):
            for d in ids:
                if d <= self.n:
                    raise ValueError(f"dummy id {d} collides with a real element")
                table[d] = (kind, d)
        child._dummies = table
        return child

    def dummy_ids(self, count: int, start: int | None = None) -> list[int]:
        """``count`` fresh ids above every real and registered dummy id."""
        base = max([self.n, *self._dummies]) if start is None else start - 1
        return list(range(base + 1, base + 1 + count))

    def is_dummy(self, i: int) -> bool:
        return i > self.n

    def _check(self, i: int, j: int) -> None:
        for e in (i, j):
            if not isinstance(e, (int, np.integer)) or e < 1:
                raise ValueError(f"invalid element id {e!r}")
            if e > self.n and e not in self._dummies:
                raise ValueError(f"unknown element id {e} (n={self.n})")
        if i == j:
            raise ValueError(f"cannot compare element {i} with itself")

    def prob(self, i: int, j: int) -> float:
        """Win probability of ``i`` over ``j``, dummies included."""
        di, dj = self._dummies.get(i), self._dummies.get(j)
        if di is None and dj is None:
            return self._P[i - 1][j - 1]
        if di is None:
            return 0.0 if dj[0] == TOP else 1.0
        if dj is None:
            return 1.0 if di[0] == TOP else 0.0
        if di[0] != dj[0]:
            return 1.0 if di[0] == TOP else 0.0
        return 1.0 if i < j else 0.0

    def charge(self, k: int) -> None:
        self.tally.add(k, self.phase)

    def duel(self, i: int, j: int) -> int:
        """One comparison; returns the winner."""
        self._check(i, j)
        self.charge(1)
        return i if self.rng.random() < self.prob(i, j) else j

    def wins(self, i: int, j: int, k: int) -> int:
        """Number of wins of ``i`` in ``k`` independent duels with ``j``."""
        self._check(i, j)
        if k < 0:
            raise ValueError("k must be nonnegative")
        self.charge(k)
        p = self.prob(i, j)
        if p <= 0.0 or p >= 1.0:
            return k if p >= 1.0 else 0
        return int(self.rng.binomial(k, p))

    def outcomes(self, i: int, j: int, size: int) -> np.ndarray:
        """``size`` duel outcomes (True = ``i`` won) WITHOUT charging the tally.

        For adaptive callers that decide afterwards how many of the draws
        they consumed; they must ``charge`` exactly that many.
        """
        self._check(i, j)
        return self.rng.random(size) < self.prob(i, j)


@dataclass
class ModelPropertyReport:
    sst_holds: bool
    sti_holds: bool
    gamma: float
    worst_violation: tuple[tuple[int, int, int], float, str] | None = None
    n_triples: int = 0
    detail: dict = field(default_factory=dict)


def verify_properties(model: PreferenceModel, tol: float = 1e-12) -> ModelPropertyReport:
    """Check strong stochastic transitivity and the triangle inequality.

    Enumerates every triple ``i > j > k`` along the true order.  ``gamma``
    is the smallest value >= 1 with ``max(pt(i,j), pt(j,k)) <= gamma *
    pt(i,k)``; it is infinite when some ``pt(i,k) <= 0`` is exceeded.
    """
    n = model.n
    if n > MAX_VERIFY_N:
        raise ValueError(f"triple enumeration limited to n <= {MAX_VERIFY_N}, got {n}")
    order = np.asarray(model.order) - 1
    D = model.matrix()[np.ix_(order, order)] - 0.5

    sst_ok = sti_ok = True
    gamma = 1.0
    worst = None
    worst_mag = 0.0
    n_triples = 0
    for b in range(1, n - 1):
        ab = D[:b, b][:, None]  # stronger vs middle
        bc = D[b, b + 1 :][None, :]  # middle vs weaker
        ac = D[:b, b + 1 :]
        n_triples += ac.size
        hi = np.maximum(ab, bc)
        sst_gap = hi - ac
        sti_gap = ac - (ab + bc)
        for gap, kind in ((sst_gap, "sst"), (sti_gap, "sti")):
            k = np.unravel_index(np.argmax(gap), gap.shape)
            mag = float(gap[k])
            if mag > tol:
                if kind == "sst":
                    sst_ok = False
                else:
                    sti_ok = False
                if mag > worst_mag:
                    worst_mag = mag
                    triple = (int(order[k[0]]) + 1, int(order[b]) + 1, int(order[b + 1 + k[1]]) + 1)
                    worst = (triple, mag, kind)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(hi > tol, hi / np.where(ac > 0, ac, 0.0), 1.0)
        ratio = np.where((hi > tol) & (ac <= 0), np.inf, ratio)
        gamma = max(gamma, float(np.nanmax(ratio)) if ratio.size else 1.0)
    if sst_ok:
        gamma = 1.0
    return ModelPropertyReport(sst_ok, sti_ok, gamma, worst, n_triples)
