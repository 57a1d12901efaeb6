import numpy as np
import pytest

from pacrank import AdjacentGapModel, MatrixModel, Oracle


@pytest.fixture
def adjacent():
    return AdjacentGapModel(16, 0.6)


def deterministic(n):
    """Noiseless model: the lower id always wins."""
    idx = np.arange(n)
    return MatrixModel(np.where(idx[:, None] < idx[None, :], 1.0, 0.0))


def score_model(scores):
    """p(i,j) = 1/2 + clip(s_i - s_j); satisfies SST and STI."""
    s = np.asarray(scores, dtype=float)
    return MatrixModel(0.5 + np.clip(s[:, None] - s[None, :], -0.5, 0.5))


@pytest.fixture
def noiseless():
    return deterministic


@pytest.fixture
def oracle_for():
    def make(model, seed=0):
        return Oracle(model, seed=seed)
    return make
