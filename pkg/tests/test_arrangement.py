import itertools
from collections import defaultdict
from fractions import Fraction
from math import floor

import pytest

from conftest import quotient
from toricdiag.arrangement import (
    ArrangementSpec,
    TranslationLattice,
    build_arrangement,
    build_quotient,
    check_transversality,
    covering_map,
    epsilon_stable,
    monomial_labels,
    quotient_complex,
    vertices_equal_lattice,
)
from toricdiag.errors import InputError, WindowTooSmallError
from toricdiag.fan import corpus_fan, load_corpus, principal_lattice
from toricdiag.linalg import IntegerMatrix, solve


def vertex_orbits_by_intersection(B, eps):
    """Independent count for rank 2: intersect pairs of lines, reduce mod Z^2.

    Returns {point in [0,1)^2: set of families through it}.
    """
    n = len(B)
    found = defaultdict(set)
    span = max(abs(x) for r in B for x in r) * 2 + 2
    for i, k in itertools.combinations(range(n), 2):
        if B[i][0] * B[k][1] - B[i][1] * B[k][0] == 0:
            continue
        for j in range(-span, span + 1):
            for l in range(-span, span + 1):
                t = solve([B[i], B[k]], [j - eps[i], l - eps[k]])
                t = tuple(x - floor(x) for x in t)
                found[t]
    for t in list(found):
        for i in range(n):
            p = B[i][0] * t[0] + B[i][1] * t[1] + eps[i]
            if p.denominator == 1:
                found[t].add(line_class(B[i], eps[i]))
    return found


def line_class(b, e):
    """Families with opposite normals and matching shifts give the same lines."""
    if tuple(b) < (0,) * len(b):
        b, e = [-x for x in b], -e
    return tuple(b), e - floor(e)


def oracle_f_vector(B, eps):
    """(vertices, edges, faces) of the rank-2 quotient by counting on the torus.

    Each family of lines closes up into circles on the torus, cut into as
    many edges as it has vertices; faces then follow from Euler characteristic 0.
    """
    orbits = vertex_orbits_by_intersection(B, [Fraction(e) for e in eps])
    f0 = len(orbits)
    f1 = sum(len(fams) for fams in orbits.values())
    return f0, f1, f1 - f0


@pytest.mark.parametrize("name", ["p2", "blp2", "blp2_other", "bl2p2"])
def test_rank_two_f_vectors_match_torus_count(name):
    data = load_corpus(name)
    qc = quotient(name)
    B = [list(r) for r in corpus_fan(name).rays]
    assert qc.f_vector() == oracle_f_vector(B, data.get("epsilon", [0] * len(B)))


def test_frozen_f_vectors():
    assert quotient("p2").f_vector() == (1, 3, 2)
    assert quotient("p1").f_vector() == (1, 1)
    assert quotient("p1", (6,)).f_vector() == (6, 6)
    assert quotient("blp2").f_vector() == (5, 10, 5)
    assert quotient("blp2_other").f_vector() == (5, 10, 5)


@pytest.mark.parametrize("name,group", [("p1", None), ("p2", None), ("blp2", None), ("p1", (6,)), ("p1", (4,)),
                                        ("bl2p2", None)])
def test_euler_characteristic_zero(name, group):
    assert quotient(name, group).euler_characteristic() == 0


def test_vertex_labels_are_floors():
    qc = quotient("blp2")
    spec = qc.spec
    for v in qc.cells[0]:
        p = spec.ambient(v.centroid)
        fl = tuple(floor(x) for x in p)
        assert v.label == fl + tuple(-x for x in fl)
    labels = {v.label for v in qc.cells[0]}
    assert (0, -1, 0, 0, 0, 1, 0, 0) in labels  # y2/x2


def test_face_labels_divide_cofaces():
    qc = quotient("blp2")
    cx = qc.window
    for c in cx.cells.values():
        for fkey, _ in c.facets:
            small = cx.cells[fkey].label
            assert all(a <= b for a, b in zip(small, c.label))


@pytest.mark.parametrize("name", ["p2", "blp2", "bl2p2"])
def test_incidence_signs_square_to_zero(name):
    cx = quotient(name).window
    for c in cx.cells.values():
        if c.dim != 2:
            continue
        total = defaultdict(int)
        for ekey, s in c.facets:
            for vkey, t in cx.cells[ekey].facets:
                total[vkey] += s * t
        assert not any(total.values())


def test_periodicity_of_labels():
    qc = quotient("blp2")
    cx, spec = qc.window, qc.spec
    checked = 0
    for c in cx.cells.values():
        for e in ((1, 0), (0, 1)):
            other = cx.cells.get(spec.translate_key(c.key, e))
            if other is None:
                continue
            assert other.label == tuple(a + b for a, b in zip(c.label, spec.lift(e)))
            assert other.dim == c.dim
            checked += 1
    assert checked > 100


def test_transversality():
    assert check_transversality(quotient("blp2").window)[0]
    assert check_transversality(quotient("blp2_other").window)[0]
    ok, witnesses = check_transversality(quotient("p2").window)
    assert not ok and witnesses


@pytest.mark.parametrize("eps", [
    ("1/97", "1/89", "1/83", "1/79"),
    ("3/101", "0", "1/103", "2/107"),
])
def test_generic_epsilon_is_transversal(eps):
    fan = corpus_fan("blp2")
    cx = build_arrangement(ArrangementSpec(fan.ray_matrix, eps), 3)
    assert check_transversality(cx)[0]


def test_vertices_equal_lattice():
    assert vertices_equal_lattice(quotient("p2").window)
    assert vertices_equal_lattice(quotient("blp2", epsilon=(0, 0, 0, 0)).window)
    half = ArrangementSpec(IntegerMatrix.from_rows([[2], [-1]]), ())
    assert not vertices_equal_lattice(build_arrangement(half, 3))
    with pytest.raises(InputError):
        vertices_equal_lattice(quotient("blp2").window)


def test_unimodular_has_one_vertex_orbit():
    assert quotient("p2").f_vector()[0] == 1
    assert quotient("blp2", epsilon=(0, 0, 0, 0)).f_vector()[0] == 1


def test_covering_maps():
    cover = covering_map(quotient("p1", (6,)), quotient("p1"))
    assert cover.degree == 6
    cover = covering_map(quotient("p1", (2,)), quotient("p1"))
    assert cover.degree == 2
    same = covering_map(quotient("p2"), quotient("p2"))
    assert same.degree == 1
    assert [len(row) for row in same.images] == [1, 3, 2]


@pytest.mark.parametrize("g", [2, 3, 4, 6])
def test_fine_f_vector_is_g_times_coarse(g):
    fine, coarse = quotient("p1", (g,)), quotient("p1")
    assert fine.f_vector() == tuple(g * x for x in coarse.f_vector())


def test_rank_two_cover():
    fine, coarse = quotient("p2", (2, 1)), quotient("p2")
    assert fine.f_vector() == tuple(2 * x for x in coarse.f_vector())
    assert covering_map(fine, coarse).degree == 2


def test_epsilon_stability():
    fan = corpus_fan("blp2")
    assert epsilon_stable(principal_lattice(fan), ("1/100", "0", "0", "1/100"))


def test_window_too_small_is_reported():
    spec = ArrangementSpec(IntegerMatrix.from_rows([[1], [-1]]), ())
    cx = build_arrangement(spec, 1)
    with pytest.raises(WindowTooSmallError):
        quotient_complex(cx, TranslationLattice(IntegerMatrix.from_rows([[12]])))
    # build_quotient grows the window itself
    assert build_quotient(spec, IntegerMatrix.from_rows([[12]])).f_vector() == (12, 12)


@pytest.mark.parametrize("kwargs", [
    {"basis": [[1], [-1]], "epsilon": ("1", "0")},
    {"basis": [[1], [-1]], "epsilon": ("-1/2", "0")},
    {"basis": [[1], [0]], "epsilon": ("0", "1/3")},
    {"basis": [[1, 0], [2, 0]], "epsilon": ()},
    {"basis": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], "epsilon": ()},
    {"basis": [[1], [-1]], "epsilon": ("0",)},
])
def test_bad_arrangement_specs(kwargs):
    with pytest.raises(InputError):
        ArrangementSpec(IntegerMatrix.from_rows(kwargs["basis"]), kwargs["epsilon"])


def test_window_radius_must_be_positive():
    with pytest.raises(InputError):
        ArrangementSpec(IntegerMatrix.from_rows([[1], [-1]]), (), 0)


def test_rank_three_enumeration():
    # P^3: unimodular, one vertex orbit, f-vector of the A_3 torus tiling
    B = IntegerMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]])
    qc = quotient_complex(build_arrangement(ArrangementSpec(B, ()), 1))
    assert qc.f_vector()[0] == 1
    assert qc.euler_characteristic() == 0


def test_quotient_json_shape():
    data = quotient("blp2").to_json()
    assert data["f_vector"] == [5, 10, 5]
    assert {"id", "dim", "offsets", "point", "label"} <= set(data["cells"][0])
    assert all(isinstance(x, str) for x in data["cells"][0]["point"])
    assert len(data["incidence"][0]) == 4
    assert len(monomial_labels(quotient("blp2"))) == 20
