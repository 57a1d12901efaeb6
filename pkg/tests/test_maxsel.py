import math

import numpy as np
import pytest

from pacrank import AdjacentGapModel, KnockoutParams, Oracle, budget, knockout, knockout_round, schedule
from pacrank.maxsel import C

from conftest import deterministic


def test_constant():
    assert C == pytest.approx(2 ** (1 / 3) - 1)


def test_schedule_telescopes():
    eps = 0.05
    sched = schedule(eps, 0.1, rounds=60)
    partial = np.cumsum([e for e, _ in sched])
    assert np.all(partial < eps)
    # closed form of the tail: c eps 2^{-1/3} / (1 - 2^{-1/3}) = eps
    assert C * eps * 2 ** (-1 / 3) / (1 - 2 ** (-1 / 3)) == pytest.approx(eps, abs=1e-12)
    assert partial[-1] == pytest.approx(eps, rel=1e-5)


def test_schedule_monotone_and_gamma():
    sched = schedule(0.1, 0.2, gamma=2.0, rounds=10)
    eps_i, delta_i = zip(*sched)
    assert all(a > b for a, b in zip(eps_i, eps_i[1:]))
    assert all(a > b for a, b in zip(delta_i, delta_i[1:]))
    assert eps_i[0] == pytest.approx(C * 0.1 / (2.0 * 2 ** (1 / 3)))
    assert delta_i[2] == pytest.approx(0.2 / 8)
    with pytest.raises(ValueError):
        KnockoutParams(0.1, 0.1, gamma=0.5)


class TestKnockoutRound:
    def test_forced_pair(self):
        assert knockout_round([1, 2], 0.1, 0.1, Oracle(deterministic(2), seed=0)) == [1]

    def test_size_and_budget(self):
        o = Oracle(AdjacentGapModel(8), seed=0)
        out = knockout_round(range(1, 9), 0.1, 0.1, o)
        assert len(out) == 4 and len(set(out)) == 4
        assert o.tally.total <= 4 * (budget(0.1, 0.1) + 1)

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            knockout_round([1, 2, 3], 0.1, 0.1, Oracle(AdjacentGapModel(3)))

    def test_best_survives(self):
        model = AdjacentGapModel(16, 0.6)
        kept = sum(1 in knockout_round(range(1, 17), 0.1, 0.1, Oracle(model, seed=s)) for s in range(200))
        assert kept >= 170

    def test_parallel_matches_serial(self):
        model = AdjacentGapModel(16, 0.6)
        for s in range(5):
            a = Oracle(model, seed=s)
            b = Oracle(model, seed=s)
            assert knockout_round(range(1, 17), 0.05, 0.1, a) == knockout_round(range(1, 17), 0.05, 0.1, b, n_jobs=4)
            assert a.tally.total == b.tally.total


class TestKnockout:
    def test_singleton(self):
        o = Oracle(AdjacentGapModel(3), seed=0)
        assert knockout([2], 0.1, 0.1, o) == 2
        assert o.tally.total == 0

    def test_empty(self):
        with pytest.raises(ValueError):
            knockout([], 0.1, 0.1, Oracle(AdjacentGapModel(3)))

    def test_padding_and_rounds(self, monkeypatch):
        import pacrank.maxsel as ms
        sizes = []
        real = ms.knockout_round

        def spy(S, *a, **k):
            sizes.append(len(S))
            return real(S, *a, **k)

        monkeypatch.setattr(ms, "knockout_round", spy)
        out = ms.knockout(list(range(1, 8)), 0.1, 0.1, Oracle(AdjacentGapModel(7), seed=1))
        assert sizes == [8, 4, 2]
        assert 1 <= out <= 7

    def test_output_is_real(self):
        for n in (3, 5, 6, 9):
            for s in range(10):
                assert 1 <= knockout(range(1, n + 1), 0.1, 0.2, Oracle(AdjacentGapModel(n), seed=s)) <= n

    def test_noiseless(self):
        for s in range(10):
            assert knockout(range(1, 12), 0.1, 0.1, Oracle(deterministic(11), seed=s)) == 1

    def test_gamma_one_bit_identical(self):
        model = AdjacentGapModel(13, 0.6)
        a = Oracle(model, seed=42)
        b = Oracle(model, seed=42)
        assert knockout(range(1, 14), 0.05, 0.1, a) == knockout(range(1, 14), 0.05, 0.1, b, gamma=1.0)
        assert a.tally.total == b.tally.total

    def test_gamma_costs_more(self):
        model = AdjacentGapModel(8, 0.6)
        t1 = sum(_cost(model, s, 1.0) for s in range(10))
        t2 = sum(_cost(model, s, 3.0) for s in range(10))
        assert t2 > t1

    def test_parallel_matches_serial(self):
        model = AdjacentGapModel(20, 0.6)
        a, b = Oracle(model, seed=8), Oracle(model, seed=8)
        assert knockout(range(1, 21), 0.05, 0.1, a) == knockout(range(1, 21), 0.05, 0.1, b, n_jobs=3)
        assert a.tally.total == b.tally.total


def _cost(model, seed, gamma):
    o = Oracle(model, seed=seed)
    knockout(range(1, model.n + 1), 0.05, 0.1, o, gamma=gamma)
    return o.tally.total
