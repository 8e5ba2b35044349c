import functools

import pytest

from toricdiag.arrangement import ArrangementSpec, TranslationLattice, build_quotient
from toricdiag.fan import corpus_fan, load_corpus
from toricdiag.linalg import IntegerMatrix
from toricdiag.resolution import cellular_differential


@functools.lru_cache(maxsize=None)
def quotient(name, group=None, epsilon=None):
    """Quotient complex of a corpus fan, memoised across the test session."""
    data = load_corpus(name)
    fan = corpus_fan(name)
    eps = epsilon if epsilon is not None else tuple(data.get("epsilon", ()))
    spec = ArrangementSpec(fan.ray_matrix, eps)
    lat = None
    if group:
        diag = list(group) + [1] * (fan.dim - len(group))
        lat = TranslationLattice(IntegerMatrix.from_rows(
            [[diag[i] if i == j else 0 for j in range(fan.dim)] for i in range(fan.dim)], fan.dim))
    return build_quotient(spec, lat)


@functools.lru_cache(maxsize=None)
def complex_of(name, group=None, epsilon=None):
    return cellular_differential(quotient(name, group, epsilon))


@pytest.fixture
def qc_of():
    return quotient


@pytest.fixture
def cc_of():
    return complex_of
