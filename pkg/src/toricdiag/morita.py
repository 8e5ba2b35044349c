"""Truncated graded check of A = End(⊕_χ O(χ)) against π(M) for A^n / G.

Algebra basis elements are triples (α, ρ1, ρ2) standing for w^α e_{ρ1 ρ2},
with ρ1 - ρ2 equal to the weighted degree of α. Elements of the tensor
module are concrete Laurent monomials x^c y^d (c + d >= 0) considered modulo
(c, d) ~ (c + v, d - v) for v in the cofinite sublattice L̃ of Z^n.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError
from .lattice import (
    FiniteAbelianGroup,
    Lattice,
    cofinite_sublattice,
    lattice_points_in_box,
    quotient_group,
)
from .linalg import IntegerMatrix


def exponents_up_to(n: int, N: int) -> list[tuple[int, ...]]:
    """All α in N^n with |α|_1 <= N, graded then lexicographic."""
    out = []
    for total in range(N + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            a = [0] * n
            for i in combo:
                a[i] += 1
            out.append(tuple(a))
    return sorted(set(out), key=lambda a: (sum(a), a))


@dataclass(frozen=True)
class MoritaSetup:
    n: int
    group: FiniteAbelianGroup
    weights: tuple[tuple[int, ...], ...]  # one group element per coordinate
    sublattice: Lattice  # L̃ = kernel of the weight map Z^n -> G

    @classmethod
    def create(cls, n: int, factors: Sequence[int], weights: Sequence) -> "MoritaSetup":
        G, convert = FiniteAbelianGroup.presentation(factors)
        ws = []
        for w in weights:
            w = (w,) if isinstance(w, int) else tuple(w)
            ws.append(convert(w))
        if len(ws) != n:
            raise InputError(f"need {n} weights, got {len(ws)}")
        sub = cofinite_sublattice(Lattice(IntegerMatrix.identity(n)), G, ws)
        return cls(n, G, tuple(ws), sub.sublattice)

    def weight(self, a: Sequence[int]) -> tuple[int, ...]:
        """Weighted degree of x^a in G."""
        tot = self.group.zero()
        for k, w in zip(a, self.weights):
            tot = self.group.add(tot, self.group.scale(k, w))
        return tot

    def lifts(self) -> dict:
        """A fixed small vector of Z^n for every element of G (coset representatives of Z^n / L̃)."""
        found = {}
        order = self.group.order
        for radius in range(order + 1):
            for v in itertools.product(range(radius + 1), repeat=self.n):
                if max(v, default=0) != radius and radius:
                    continue
                g = self.weight(v)
                found.setdefault(g, v)
            if len(found) == order:
                return found
        raise InputError("weights do not generate the group")


# -- the algebra side ----------------------------------------------------------------------


@dataclass(frozen=True)
class GradedBasisAlgebra:
    setup: MoritaSetup
    degree: int
    basis: tuple[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], ...]
    surjective: bool

    def grading(self, elem) -> tuple:
        """G×G degree (ρ1, -ρ2) of w^α e_{ρ1 ρ2}."""
        _, r1, r2 = elem
        return r1, self.setup.group.neg(r2)


def build_algebra(setup: MoritaSetup, N: int) -> GradedBasisAlgebra:
    G = setup.group
    basis = []
    for a in exponents_up_to(setup.n, N):
        for r2 in G.elements():
            basis.append((a, G.add(setup.weight(a), r2), tuple(r2)))
    image = {setup.weight(v) for v in itertools.product(range(G.order), repeat=setup.n)} if G.rank else {()}
    return GradedBasisAlgebra(setup, N, tuple(basis), len(image) == G.order)


def algebra_left(setup: MoritaSetup, beta, elem):
    a, r1, r2 = elem
    return tuple(x + y for x, y in zip(a, beta)), setup.group.add(r1, setup.weight(beta)), r2


def algebra_right(setup: MoritaSetup, beta, elem):
    a, r1, r2 = elem
    return tuple(x + y for x, y in zip(a, beta)), r1, setup.group.add(r2, setup.group.neg(setup.weight(beta)))


# -- the module side --------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedPiModule:
    setup: MoritaSetup
    degree: int
    basis: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # concrete (c, d)

    def grading(self, elem) -> tuple:
        c, d = elem
        return self.setup.weight(c), self.setup.weight(d)


def build_pi_module(setup: MoritaSetup, N: int) -> GradedPiModule:
    """x^α ⊗ z^v̄ realised as x^{α+v} y^{-v} for a fixed lift v of each coset."""
    lab = quotient_group(Lattice(IntegerMatrix.identity(setup.n)), setup.sublattice)
    reps = {}
    for v in itertools.product(range(max(lab.group.order, 1)), repeat=setup.n):
        reps.setdefault(lab(v), v)
        if len(reps) == lab.group.order:
            break
    basis = []
    for a in exponents_up_to(setup.n, N):
        for g in sorted(reps):
            v = reps[g]
            basis.append((tuple(x + y for x, y in zip(a, v)), tuple(-y for y in v)))
    return GradedPiModule(setup, N, tuple(basis))


def pi_equal(setup: MoritaSetup, e1, e2) -> bool:
    (c1, d1), (c2, d2) = e1, e2
    if [a + b for a, b in zip(c1, d1)] != [a + b for a, b in zip(c2, d2)]:
        return False
    return setup.sublattice.contains([a - b for a, b in zip(d1, d2)])


def pi_in_module(elem) -> bool:
    c, d = elem
    return all(a + b >= 0 for a, b in zip(c, d))


def module_left(beta, elem):
    c, d = elem
    return tuple(x + y for x, y in zip(c, beta)), d


def module_right(beta, elem):
    c, d = elem
    return c, tuple(x + y for x, y in zip(d, beta))


# -- the two maps -------------------------------------------------------------------------------------


def psi(setup: MoritaSetup, elem, lifts=None):
    """w^α e_{ρ1 ρ2} ↦ x^α ⊗ z^{Λ(ρ2)}, realised as x^{α + v} y^{-v} with v lifting ρ2."""
    lifts = lifts or setup.lifts()
    a, r1, r2 = elem
    if setup.group.add(setup.weight(a), r2) != tuple(r1):
        raise InputError(f"{elem} violates ρ1 - ρ2 = |α|")
    v = lifts[tuple(r2)]
    return tuple(x + y for x, y in zip(a, v)), tuple(-y for y in v)


def phi(setup: MoritaSetup, elem):
    """x^α ⊗ z^v̄ ↦ w^α e_{|α| + v̄, v̄}, read off from a concrete representative."""
    c, d = elem
    a = tuple(x + y for x, y in zip(c, d))
    if any(x < 0 for x in a):
        raise InputError(f"{elem} is not in the module")
    vbar = setup.weight(tuple(-y for y in d))
    return a, setup.group.add(setup.weight(a), vbar), vbar


def bijection_check(setup: MoritaSetup, N: int) -> bool:
    """Ψ and Φ are mutually inverse, degree preserving, and match the two bases."""
    A = build_algebra(setup, N)
    P = build_pi_module(setup, N)
    lifts = setup.lifts()
    if len(A.basis) != len(P.basis):
        return False
    for e in A.basis:
        image = psi(setup, e, lifts)
        if phi(setup, image) != e:
            return False
        if P.grading(image) != A.grading(e):
            return False
    hit = set()
    for m in P.basis:
        back = phi(setup, m)
        if not pi_equal(setup, psi(setup, back, lifts), m):
            return False
        hit.add(back)
    return hit == set(A.basis)


def action_compatibility(setup: MoritaSetup, N: int) -> bool:
    """Ψ(x^β a) = x^β Ψ(a) and Ψ(y^β a) = y^β Ψ(a) for |β| <= N/2."""
    A = build_algebra(setup, N)
    lifts = setup.lifts()
    for beta in exponents_up_to(setup.n, N // 2):
        for e in A.basis:
            lhs = psi(setup, algebra_left(setup, beta, e), lifts)
            rhs = module_left(beta, psi(setup, e, lifts))
            if not pi_equal(setup, lhs, rhs):
                return False
            lhs = psi(setup, algebra_right(setup, beta, e), lifts)
            rhs = module_right(beta, psi(setup, e, lifts))
            if not pi_equal(setup, lhs, rhs):
                return False
    return True


def graded_dimensions(setup: MoritaSetup, N: int) -> tuple[dict, dict]:
    """Counts per (|α|_1, G×G degree) on both sides."""
    A = build_algebra(setup, N)
    P = build_pi_module(setup, N)
    da = Counter((sum(e[0]), A.grading(e)) for e in A.basis)
    dp = Counter((sum(a + b for a, b in zip(*m)), P.grading(m)) for m in P.basis)
    return dict(da), dict(dp)


def antidiagonal_decomposition_check(L: Lattice, Lt: Lattice, N: int) -> bool:
    """Every v in L with |v| <= N is uniquely ṽ + ū, ṽ in L̃, ū a fixed coset representative."""
    lab = quotient_group(L, Lt)
    reps = {}
    for c in itertools.product(range(max(lab.group.order, 1)), repeat=L.rank):
        reps.setdefault(lab.of_coefficients(c), L.point(c))
    if len(reps) != lab.group.order:
        return False
    n = L.ambient_rank
    for v in lattice_points_in_box(L, [-N] * n, [N] * n):
        hits = [u for u in reps.values() if Lt.contains([a - b for a, b in zip(v, u)])]
        if len(hits) != 1:
            return False
    return True


def morita_report(n: int, factors: Sequence[int], weights: Sequence, N: int) -> dict:
    setup = MoritaSetup.create(n, factors, weights)
    da, dp = graded_dimensions(setup, N)
    keys = sorted(set(da) | set(dp))
    return {
        "group": list(setup.group.invariant_factors),
        "weights": [list(w) for w in setup.weights],
        "degree": N,
        "algebra_size": len(build_algebra(setup, N).basis),
        "module_size": len(build_pi_module(setup, N).basis),
        "bijection": bijection_check(setup, N),
        "action_compat": action_compatibility(setup, N),
        "graded_dims": [
            {"alpha_degree": k[0], "degree": [list(k[1][0]), list(k[1][1])],
             "algebra": da.get(k, 0), "module": dp.get(k, 0)}
            for k in keys
        ],
        "graded_dims_agree": da == dp,
        "antidiagonal": antidiagonal_decomposition_check(
            Lattice(IntegerMatrix.identity(n)), setup.sublattice, N),
    }
