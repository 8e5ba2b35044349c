import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricdiag.cech import (
    WeightedProjLine,
    cech_oracle,
    exceptional_collection_check,
    ext_dims,
    h_dims,
    koszul_degree_data,
    koszul_sequence_check,
)
from toricdiag.errors import InputError

WEIGHTS = [(1, 1), (1, 2), (2, 3), (3, 5)]


def test_vanishing_on_p12():
    assert h_dims(1, 2, -1) == (0, 0)
    assert h_dims(1, 2, -2) == (0, 0)
    assert h_dims(1, 2, -3) == (0, 1)


def test_frozen_small_values():
    assert h_dims(1, 1, 3) == (4, 0)
    assert h_dims(1, 1, -3) == (0, 2)
    assert h_dims(2, 3, 1) == (0, 0)
    assert h_dims(2, 3, 6) == (2, 0)


@pytest.mark.parametrize("a,b", WEIGHTS)
def test_counting_matches_cech_ranks(a, b):
    for n in range(-30, 31):
        assert h_dims(a, b, n) == cech_oracle(a, b, n), n


@pytest.mark.parametrize("a,b", WEIGHTS)
def test_serre_type_duality(a, b):
    for n in range(-30, 31):
        assert h_dims(a, b, n)[1] == h_dims(a, b, -n - a - b)[0]


@given(st.sampled_from(WEIGHTS), st.integers(-40, 40))
def test_euler_characteristic_is_eventually_linear(ab, n):
    # h0 - h1 over a full period of a*b grows by exactly one
    a, b = ab
    h0, h1 = h_dims(a, b, n)
    g0, g1 = h_dims(a, b, n + a * b)
    assert (g0 - g1) - (h0 - h1) == 1


def test_ext_groups():
    assert ext_dims(1, 2, 2, 1) == [(0, 0), (1, 0)]
    assert ext_dims(1, 2, 2, 0) == [(0, 0), (1, 0)]
    assert ext_dims(1, 2, 0, 0) == [(0, 1), (1, 0)]


def test_exceptional_collections():
    assert exceptional_collection_check(1, 2, [0, 1, 2]).ok
    assert exceptional_collection_check(1, 1, [0, 1]).ok
    rep = exceptional_collection_check(1, 2, [0, 1, 2, 3])
    assert not rep.ok
    assert {"kind": "backward_ext", "from": 3, "to": 0, "ext": [0, 1]} in rep.violations


def test_standard_collections_for_small_weights():
    for a, b in [(1, 1), (1, 2)]:
        assert exceptional_collection_check(a, b, list(range(a + b))).ok


def test_twists_must_increase():
    with pytest.raises(InputError):
        exceptional_collection_check(1, 2, [0, 0, 1])


@pytest.mark.parametrize("a,b,N", [(1, 2, 8), (1, 1, 8), (2, 3, 12)])
def test_koszul_sequence(a, b, N):
    assert koszul_sequence_check(a, b, N)


def test_koszul_leaves_only_the_residue_field():
    rows = koszul_degree_data(1, 2, 5)
    assert rows[0]["homology"] == [0, 0, 1]
    assert all(r["homology"] == [0, 0, 0] for r in rows[1:])
    # degree 3 of 0 -> S(-3) -> S(-1) + S(-2) -> S: dimensions 1, 2 + 1, 2
    assert rows[3]["dims"] == [1, 3, 2]


@pytest.mark.parametrize("a,b", [(2, 4), (0, 1), (-1, 2)])
def test_bad_weights(a, b):
    with pytest.raises(InputError):
        WeightedProjLine(a, b)
    with pytest.raises(InputError):
        h_dims(a, b, 0)
