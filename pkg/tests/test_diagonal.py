import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import quotient
from toricdiag.diagonal import (
    Binomial,
    binomial_generators,
    cokernel_extra_monomials,
    floor_label,
    floor_shift_check,
    in_lattice_module,
    lattice_module_witness,
    lattice_monomial,
    lawrence_equals_lattice_ideal_check,
    torsion_certificate,
    v_sigma_finder,
    verify_witness,
)
from toricdiag.errors import InputError
from toricdiag.fan import corpus_fan, irrelevant_ideal, principal_lattice

BLP2_L = principal_lattice(corpus_fan("blp2"))


def brute_member(w, L, reach=6):
    for c in itertools.product(range(-reach, reach + 1), repeat=L.rank):
        u = L.point(c)
        if all(a >= b for a, b in zip(w, lattice_monomial(u))):
            return True
    return False


def test_unit_and_simple_members():
    assert in_lattice_module((0,) * 8, BLP2_L)
    assert in_lattice_module((1, 1, 0, 0, 0, 0, 0, 1), BLP2_L)  # x1*x2*y4 dominates x^u y^-u for u = (1, 1, 0, -1)
    assert not in_lattice_module((0, -1, 0, 0, 0, 1, 0, 0), BLP2_L)  # y2/x2
    with pytest.raises(InputError):
        in_lattice_module((0, 0), BLP2_L)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=8, max_size=8))
def test_membership_against_brute_force(w):
    assert in_lattice_module(w, BLP2_L) == brute_member(w, BLP2_L)
    u = lattice_module_witness(w, BLP2_L)
    if u is not None:
        assert BLP2_L.contains(u)
        assert all(a >= b for a, b in zip(w, lattice_monomial(u)))


def test_binomials_of_the_blowup_lattice():
    vecs = [(1, 1, 0, -1), (0, 1, 1, -1), (1, 0, -1, 0)]
    names = ["x1", "x2", "x3", "x4"]
    got = [b.format(names) for b in binomial_generators(vecs, "I_L")]
    assert got == ["x1*x2 - x4", "x2*x3 - x4", "x1 - x3"]
    names8 = names + ["y1", "y2", "y3", "y4"]
    got = [b.format(names8) for b in binomial_generators(vecs, "J_L")]
    assert got == ["x1*x2*y4 - x4*y1*y2", "x2*x3*y4 - x4*y2*y3", "x1*y3 - x3*y1"]
    assert lawrence_equals_lattice_ideal_check(vecs)
    assert lawrence_equals_lattice_ideal_check(vecs[:2])
    with pytest.raises(InputError):
        binomial_generators(vecs, "nope")


def test_binomial_normal_form_is_orientation_free():
    b = Binomial((1, 0), (0, 1))
    assert b.normalized() == Binomial((0, 1), (1, 0)).normalized()


def test_extra_monomials_nef_chamber():
    assert cokernel_extra_monomials(quotient("blp2"), BLP2_L) == [(0, -1, 0, 0, 0, 1, 0, 0)]


def test_extra_monomials_other_chamber():
    got = cokernel_extra_monomials(quotient("blp2_other"), BLP2_L)
    assert sorted(got) == sorted([(-1, 0, 0, 0, 1, 0, 0, 0), (0, 0, -1, 0, 0, 0, 1, 0)])


def test_no_extra_monomials_for_p2():
    assert cokernel_extra_monomials(quotient("p2"), principal_lattice(corpus_fan("p2"))) == []


@pytest.mark.parametrize("name", ["blp2", "blp2_other"])
def test_torsion_certificates_with_k_one(name):
    fan = corpus_fan(name)
    ideal = irrelevant_ideal(fan, product=True)
    for m in cokernel_extra_monomials(quotient(name), BLP2_L):
        cert = torsion_certificate(m, ideal, BLP2_L)
        assert cert.ok and cert.k == 1
        assert not cert.degenerate
        for g, k, u in cert.entries:
            assert verify_witness(m, g, k, u)
            assert BLP2_L.contains(u)


def test_certificate_failure_is_reported():
    # the all-x generator never clears a y-denominator
    m = (0, 0, 0, 0, 0, -1, 0, 0)
    cert = torsion_certificate(m, [(1, 1, 1, 1, 0, 0, 0, 0)], BLP2_L, k_max=3)
    assert not cert.ok
    assert cert.to_json()["k"] is None


def test_certificate_in_module_is_degenerate():
    cert = torsion_certificate((0,) * 8, [(1, 0, 0, 0, 0, 0, 0, 0)], BLP2_L)
    assert cert.degenerate


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=60), min_size=4, max_size=4),
       st.lists(st.integers(-20, 20), min_size=4, max_size=4))
def test_floor_shift_property(p, v):
    assert floor_shift_check(p, v)


def test_floor_label():
    assert floor_label([Fraction(-1, 100), Fraction(1, 2)]) == (-1, 0, 1, 0)


def test_v_sigma_for_blowup_cones():
    fan = corpus_fan("blp2")
    p = [Fraction(-1, 100), Fraction(0), Fraction(0), Fraction(1, 100)]
    for cone in fan.max_cones:
        res = v_sigma_finder(p, fan, cone)
        assert res.vector is not None, cone
        q = [a + b for a, b in zip(p, res.vector)]
        assert all((x < 0) if i in cone else (x > 0) for i, x in enumerate(q))
        assert principal_lattice(fan).contains(res.vector)


def test_v_sigma_small_cases():
    p2 = corpus_fan("p2")
    assert v_sigma_finder([0, 0, 0], p2, (0, 1)).vector == (-1, -1, 2)
    p1 = corpus_fan("p1")
    assert v_sigma_finder([Fraction(1, 2), Fraction(1, 2)], p1, (0,)).vector == (-1, 1)
