import itertools
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix

from toricdiag.errors import InputError
from toricdiag.lattice import (
    FiniteAbelianGroup,
    Lattice,
    box_lattice_point,
    cofinite_sublattice,
    cokernel,
    hermite_normal_form,
    invariant_factors,
    is_unimodular,
    kernel_basis,
    lattice_points_in_box,
    lawrence_lift,
    quotient_group,
    smith_normal_form,
)
from toricdiag.linalg import IntegerMatrix, det, maximal_minors, sparse_rank


def determinantal_divisors(rows):
    """d_k = gcd of all k×k minors; the invariant factors are d_k / d_{k-1}."""
    M = Matrix(rows)
    r, c = M.shape
    out = []
    for k in range(1, min(r, c) + 1):
        g = 0
        for I in itertools.combinations(range(r), k):
            for J in itertools.combinations(range(c), k):
                g = gcd(g, int(M.extract(list(I), list(J)).det()))
        if g == 0:
            break
        out.append(g)
    return out


def oracle_invariant_factors(rows):
    d = determinantal_divisors(rows)
    prev = 1
    out = []
    for x in d:
        out.append(x // prev)
        prev = x
    return tuple(out)


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))


def test_hnf_worked_example():
    H, U = hermite_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert H.tolist() == [[2, 0, 0], [0, 6, 0], [10, 0, 12]]
    A = IntegerMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert (A @ U) == H
    assert abs(det(U.entries)) == 1


def test_snf_worked_example():
    D, P, Q = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert [D[i, i] for i in range(3)] == [2, 6, 12]
    A = IntegerMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert P @ A @ Q == D


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_hnf_shape_and_unimodularity(rows):
    A = IntegerMatrix.from_rows(rows)
    H, U = hermite_normal_form(A)
    assert A @ U == H
    assert abs(det(U.entries)) == 1
    # column echelon: pivots strictly move down, are positive, entries left of a pivot reduced
    prev = -1
    for j in range(H.cols):
        col = H.column(j)
        nz = [i for i, x in enumerate(col) if x]
        if not nz:
            assert all(not any(H.column(k)) for k in range(j, H.cols))
            break
        p = nz[0]
        assert p > prev and col[p] > 0
        for k in range(j):
            assert 0 <= H[p, k] < col[p]
        prev = p


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_against_determinantal_divisors(rows):
    A = IntegerMatrix.from_rows(rows)
    D, P, Q = smith_normal_form(A)
    assert P @ A @ Q == D
    assert abs(det(P.entries)) == 1 and abs(det(Q.entries)) == 1
    diag = [D[i, i] for i in range(min(D.shape)) if D[i, i]]
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))
    assert tuple(diag) == oracle_invariant_factors(rows)
    assert tuple(x for x in invariant_factors(A) if x) == oracle_invariant_factors(rows)


def test_finite_group_normalises_to_invariant_factors():
    assert FiniteAbelianGroup.from_factors([2, 3]).invariant_factors == (6,)
    assert FiniteAbelianGroup.from_factors([4, 2]).invariant_factors == (2, 4)
    with pytest.raises(InputError):
        FiniteAbelianGroup((4, 2))
    G, convert = FiniteAbelianGroup.presentation([2, 3])
    images = {convert(g) for g in itertools.product(range(2), range(3))}
    assert G.order == 6 and len(images) == 6


def test_kernel_and_cokernel_small_cases():
    assert kernel_basis([[1, 1, 1]]).vectors() == [(1, 0, -1), (0, 1, -1)]
    co = cokernel(IntegerMatrix.from_rows([[4], [-4]]))
    assert co.torsion.invariant_factors == (4,)
    assert co.free_rank == 1
    assert co((4, -4)) == co((0, 0))
    assert co((1, 0)) != co((0, 0))


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_kernel_is_saturated_and_annihilated(rows):
    A = IntegerMatrix.from_rows(rows)
    K = kernel_basis(A)
    assert K.rank == A.cols - Matrix(rows).rank()
    for v in K.vectors():
        assert all(x == 0 for x in A @ v)
    # saturation: the kernel lattice has trivial torsion in Z^c / K
    if K.rank:
        assert all(f == 1 for f in invariant_factors(K.basis) if f)


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_cokernel_order_matches_torsion(rows):
    A = IntegerMatrix.from_rows(rows)
    co = cokernel(A)
    oracle = oracle_invariant_factors(rows)
    assert co.free_rank == A.rows - len(oracle)
    assert tuple(x for x in co.torsion.invariant_factors) == tuple(x for x in oracle if x > 1)
    for j in range(A.cols):
        assert co(A.column(j)) == co((0,) * A.rows)


def test_unimodular_against_exhaustive_minors():
    p2 = IntegerMatrix.from_rows([[1, 0], [0, 1], [-1, -1]])
    bl2 = IntegerMatrix.from_rows([[1, 0], [2, 1], [1, 1], [0, 1], [-1, -1]])
    assert is_unimodular(p2)
    assert not is_unimodular(bl2)
    assert 2 in [abs(x) for x in maximal_minors(bl2)]


@settings(max_examples=120, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=5))
def test_unimodular_matches_minor_enumeration(rows):
    B = IntegerMatrix.from_rows(rows)
    if Matrix(rows).rank() < 2:
        with pytest.raises(InputError):
            is_unimodular(B)
        return
    minors = [int(Matrix([rows[i], rows[j]]).det()) for i, j in itertools.combinations(range(len(rows)), 2)]
    assert is_unimodular(B) == all(x in (-1, 0, 1) for x in minors)


def test_lawrence_lift():
    L = Lattice.from_vectors([(1, -1, 0), (0, 1, -1)], 3)
    lifted = lawrence_lift(L)
    assert lifted.ambient_rank == 6
    assert lifted.contains((1, -1, 0, -1, 1, 0))
    assert not lifted.contains((1, -1, 0, 1, -1, 0))


def test_cofinite_sublattice_and_quotient():
    L = Lattice.from_vectors([(1, -1)], 2)
    G = FiniteAbelianGroup((4,))
    sub = cofinite_sublattice(L, G, [(1,)])
    assert sub.sublattice.same_as(Lattice.from_vectors([(4, -4)], 2))
    lab = quotient_group(L, sub.sublattice)
    assert lab.group.order == 4
    assert len({lab((k, -k)) for k in range(8)}) == 4
    with pytest.raises(InputError):
        cofinite_sublattice(L, FiniteAbelianGroup((2, 2)), [(1, 0)])


def brute_box(L, lo, hi, reach=8):
    found = set()
    for c in itertools.product(range(-reach, reach + 1), repeat=L.rank):
        u = L.point(c)
        if all(a <= x <= b for a, x, b in zip(lo, u, hi)):
            found.add(u)
    return found


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=4, max_size=4), st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_box_points_against_enumeration(lo, width):
    L = Lattice.from_vectors([(1, 1, 0, -1), (0, 1, 1, -1)], 4)
    hi = [a + w for a, w in zip(lo, width)]
    fast = set(lattice_points_in_box(L, lo, hi))
    assert fast == brute_box(L, lo, hi)
    pt = box_lattice_point(L, lo, hi)
    assert (pt is None) == (not fast)
    if pt is not None:
        assert pt in fast


def test_sparse_rank_against_sympy():
    rows = [[1, 2, 0, 3], [2, 4, 0, 6], [0, 1, 1, 0], [1, 3, 1, 3]]
    sparse = [{j: x for j, x in enumerate(r) if x} for r in rows]
    assert sparse_rank(sparse) == Matrix(rows).rank() == 2


def test_matrix_json_round_trip():
    A = IntegerMatrix.from_rows([[10 ** 30, -1], [0, 7]])
    data = A.to_json()
    assert data["entries"][0][0] == str(10 ** 30)
    assert IntegerMatrix.from_json(data) == A
    L = Lattice(A)
    assert Lattice.from_json(L.to_json()) == L
