import math

import pytest
from hypothesis import given, settings, strategies as st

from pacrank import AdjacentGapModel, Oracle, budget, merge, merge_rank, rank3, seq_error

from conftest import deterministic


class TestSeqError:
    def test_perfect_and_reversed(self):
        m = AdjacentGapModel(6, 0.6)
        asc = list(range(6, 0, -1))
        assert seq_error(asc, m) == pytest.approx(-0.1)
        assert seq_error(asc[::-1], m) == pytest.approx(0.1)

    def test_short(self):
        m = AdjacentGapModel(3)
        assert seq_error([2], m) == 0.0
        assert seq_error([], m) == 0.0

    def test_brute_force(self):
        m = AdjacentGapModel(5, 0.7)
        seq = [3, 5, 1, 4, 2]
        want = max(m.margin(seq[i], seq[j]) for i in range(5) for j in range(i + 1, 5))
        assert seq_error(seq, m) == pytest.approx(want)


class TestMerge:
    def test_two_singletons(self):
        assert merge([2], [1], 0.1, 0.1, Oracle(deterministic(2))) == [2, 1]
        assert merge([1], [2], 0.1, 0.1, Oracle(deterministic(2))) == [2, 1]

    def test_trace(self, monkeypatch):
        import pacrank.mergerank as mr
        calls = []
        real = mr.compare

        def spy(a, b, *rest):
            calls.append((a, b))
            return real(a, b, *rest)

        monkeypatch.setattr(mr, "compare", spy)
        out = mr.merge([4, 3], [2, 1], 0.1, 0.1, Oracle(deterministic(4), seed=0))
        assert out == [4, 3, 2, 1]
        assert calls == [(4, 2), (3, 2)]
        calls.clear()
        out = mr.merge([4, 2], [3, 1], 0.1, 0.1, Oracle(deterministic(4), seed=0))
        assert out == [4, 3, 2, 1]
        assert calls == [(4, 3), (2, 3), (2, 1)]

    def test_merge_error_stays_within_eps(self):
        m = AdjacentGapModel(16, 0.6)
        left, right = list(range(16, 0, -2)), list(range(15, 0, -2))
        ok = 0
        for s in range(200):
            out = merge(left, right, 0.02, 0.001, Oracle(m, seed=s))
            ok += seq_error(out, m) <= 0.02
        assert ok >= 196


class TestMergeRank:
    def test_singleton(self):
        o = Oracle(AdjacentGapModel(3))
        assert merge_rank([2], 0.1, 0.1, o) == [2]
        assert o.tally.total == 0

    @settings(max_examples=30, deadline=None)
    @given(st.permutations(list(range(1, 10))))
    def test_noiseless_sorts(self, perm):
        assert merge_rank(perm, 0.1, 0.1, Oracle(deterministic(9), seed=0)) == list(range(9, 0, -1))

    @settings(max_examples=20, deadline=None)
    @given(st.permutations(list(range(1, 12))), st.integers(0, 2**32 - 1))
    def test_permutation_of_input(self, perm, seed):
        out = merge_rank(perm, 0.1, 0.2, Oracle(AdjacentGapModel(11, 0.55), seed=seed))
        assert sorted(out) == sorted(perm)

    def test_budget_bound(self):
        eps, delta = 0.1, 0.01
        m = math.ceil(math.log(2 / delta) / (2 * eps * eps))
        assert m == budget(eps, delta)
        o = Oracle(AdjacentGapModel(8), seed=3)
        merge_rank(range(1, 9), eps, delta, o)
        assert o.tally.total <= 24 * (m + 1)

    def test_merge_count_and_depth(self, monkeypatch):
        import pacrank.mergerank as mr
        merges = []
        real = mr.merge
        monkeypatch.setattr(mr, "merge", lambda *a: merges.append(len(a[0]) + len(a[1])) or real(*a))
        mr.merge_rank(list(range(1, 12)), 0.1, 0.1, Oracle(deterministic(11), seed=0))
        assert len(merges) <= 11
        assert max(merges) == 11


class TestRank3:
    def test_inner_parameters(self, monkeypatch):
        import pacrank.mergerank as mr
        seen = {}
        monkeypatch.setattr(mr, "merge_rank", lambda S, e, d, o: seen.update(eps=e, delta=d) or list(S))
        mr.rank3(list(range(1, 33)), 0.05, 0.1, Oracle(AdjacentGapModel(32)))
        assert seen["eps"] == pytest.approx(0.01)
        assert seen["delta"] == pytest.approx(0.1 / 1024)

    def test_too_small(self):
        with pytest.raises(ValueError):
            rank3([1], 0.1, 0.1, Oracle(AdjacentGapModel(2)))

    def test_exact_ranking_small(self):
        m = AdjacentGapModel(8, 0.6)
        hits = sum(rank3(range(1, 9), 0.05, 0.2, Oracle(m, seed=s)) == list(range(8, 0, -1)) for s in range(20))
        assert hits >= 16
