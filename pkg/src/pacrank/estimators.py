"""scikit-learn style wrappers.

Each estimator is "fit" on a preference source: a ``PreferenceModel`` (a
fresh oracle is seeded from ``random_state``) or an existing ``Oracle``.
Hyper-parameters follow the usual ``get_params``/``set_params`` contract,
results land in trailing-underscore attributes.
"""
from __future__ import annotations

import numbers

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_scalar

from .bench import eval_err, is_eps_maximum
from .bsr import binary_search_ranking
from .maxsel import knockout
from .mergerank import rank3
from .oracle import Oracle, PreferenceModel


def _as_oracle(X, random_state) -> Oracle:
    if isinstance(X, Oracle):
        return X
    if isinstance(X, PreferenceModel):
        return Oracle(X, seed=random_state)
    raise TypeError(f"expected a PreferenceModel or Oracle, got {type(X).__name__}")


def _check_elements(elements, oracle: Oracle) -> list[int]:
    if elements is None:
        return list(range(1, oracle.n + 1))
    out = [int(e) for e in elements]
    if not out:
        raise ValueError("elements must be non-empty")
    bad = [e for e in out if not 1 <= e <= oracle.n]
    if bad:
        raise ValueError(f"unknown element ids {bad[:5]}")
    if len(set(out)) != len(out):
        raise ValueError("elements must be distinct")
    return out


def _check_bias(est) -> None:
    check_scalar(est.eps, "eps", numbers.Real, min_val=0.0, max_val=0.5, include_boundaries="neither")


def _check_confidence(est) -> None:
    check_scalar(est.delta, "delta", numbers.Real, min_val=0.0, max_val=1.0, include_boundaries="neither")


class _PacBase(BaseEstimator):
    def _fit_context(self, X, elements):
        oracle = _as_oracle(X, self.random_state)
        self.model_ = oracle.model
        start = oracle.tally.total
        return oracle, _check_elements(elements, oracle), start

    def _check_fitted(self, attr):
        if not hasattr(self, attr):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit first")


class KnockoutSelector(_PacBase):
    """PAC maximum selection by knockout tournament.

    Attributes
    ----------
    max_ : int
        Selected element.
    n_comparisons_ : int
        Duels consumed by ``fit``.
    """

    def __init__(self, eps=0.05, delta=0.1, gamma=1.0, n_jobs=None, random_state=None):
        self.eps = eps
        self.delta = delta
        self.gamma = gamma
        self.n_jobs = n_jobs
        self.random_state = random_state

    def fit(self, X, elements=None):
        _check_bias(self)
        _check_confidence(self)
        check_scalar(self.gamma, "gamma", numbers.Real, min_val=1.0)
        oracle, S, start = self._fit_context(X, elements)
        self.max_ = knockout(S, self.eps, self.delta, oracle, gamma=self.gamma, n_jobs=self.n_jobs)
        self.n_comparisons_ = oracle.tally.total - start
        return self

    def predict(self, X=None):
        self._check_fitted("max_")
        return self.max_

    def score(self, X=None):
        """1.0 if ``max_`` is an ``eps``-maximum of the true model, else 0.0."""
        self._check_fitted("max_")
        model = self.model_ if X is None else _as_oracle(X, None).model
        return float(is_eps_maximum(self.max_, model, self.eps))


class _RankerBase(_PacBase):
    def predict(self, X=None):
        self._check_fitted("ranking_")
        return list(self.ranking_)

    def score(self, X=None):
        """Negated ranking error, so larger is better."""
        self._check_fitted("ranking_")
        model = self.model_ if X is None else _as_oracle(X, None).model
        return -eval_err(self.ranking_, model)


class MergeRanker(_RankerBase):
    """Merge ranking via ``rank3``: an ``eps``-ranking w.p. ``>= 1 - delta``.

    ``ranking_`` lists elements weakest first.
    """

    def __init__(self, eps=0.05, delta=0.1, random_state=None):
        self.eps = eps
        self.delta = delta
        self.random_state = random_state

    def fit(self, X, elements=None):
        _check_bias(self)
        _check_confidence(self)
        oracle, S, start = self._fit_context(X, elements)
        self.ranking_ = rank3(S, self.eps, self.delta, oracle) if len(S) > 1 else S
        self.n_comparisons_ = oracle.tally.total - start
        return self


class BinarySearchRanker(_RankerBase):
    """Anchor-and-bin ranking with a pluggable Rank-x backend."""

    def __init__(self, eps=0.05, x=3, n_anchors=None, rankx=None, n_jobs=None, random_state=None):
        self.eps = eps
        self.x = x
        self.n_anchors = n_anchors
        self.rankx = rankx
        self.n_jobs = n_jobs
        self.random_state = random_state

    def fit(self, X, elements=None):
        _check_bias(self)
        check_scalar(self.x, "x", numbers.Real, min_val=0.0, include_boundaries="neither")
        if self.n_anchors is not None:
            check_scalar(self.n_anchors, "n_anchors", numbers.Integral, min_val=2)
        oracle, S, start = self._fit_context(X, elements)
        self.ranking_, self.state_ = binary_search_ranking(
            S, self.eps, oracle, rankx=self.rankx or rank3, x=self.x,
            n_anchors=self.n_anchors, n_jobs=self.n_jobs, return_state=True,
        )
        self.n_comparisons_ = oracle.tally.total - start
        return self
