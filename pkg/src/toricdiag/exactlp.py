"""A small dense two-phase simplex over the rationals.

Used for feasibility of strict sign systems (scaled to margins of 1), for
separating functionals, and for coefficient bounds in lattice-point search.
Bland's rule keeps it finite; problem sizes here are a handful of variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def _pivot(T, basis, r, c):
    pv = T[r][c]
    T[r] = [v / pv for v in T[r]]
    for i, row in enumerate(T):
        if i != r and row[c] != 0:
            f = row[c]
            T[i] = [a - f * b for a, b in zip(row, T[r])]
    basis[r] = c


def _run(T, basis, cost, allowed):
    """Minimise cost·y over the tableau T (last column = rhs). Returns False if unbounded."""
    ncols = len(T[0]) - 1
    while True:
        # reduced costs
        red = list(cost)
        for i, b in enumerate(basis):
            cb = cost[b]
            if cb != 0:
                row = T[i]
                for j in range(ncols):
                    if row[j] != 0:
                        red[j] -= cb * row[j]
        enter = next((j for j in range(ncols) if allowed[j] and red[j] < 0), None)
        if enter is None:
            return True
        best = None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return False
        _pivot(T, basis, best[1], enter)


def linprog(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    nvars: int | None = None,
) -> LPResult:
    """Minimise c·x subject to A_ub x ≤ b_ub and A_eq x = b_eq with x free."""
    n = nvars if nvars is not None else len(c)
    c = [Fraction(v) for v in c] if c else [Fraction(0)] * n
    rows = []
    for a, b in zip(A_ub, b_ub):
        rows.append(([Fraction(v) for v in a], Fraction(b), True))
    for a, b in zip(A_eq, b_eq):
        rows.append(([Fraction(v) for v in a], Fraction(b), False))
    n_slack = sum(1 for r in rows if r[2])
    m = len(rows)
    nstruct = 2 * n + n_slack
    total = nstruct + m
    T = []
    s = 0
    for i, (a, b, is_ub) in enumerate(rows):
        row = [Fraction(0)] * (total + 1)
        for j in range(n):
            row[j] = a[j]
            row[n + j] = -a[j]
        if is_ub:
            row[2 * n + s] = Fraction(1)
            s += 1
        row[-1] = b
        if b < 0:
            row = [-v for v in row]
        row[nstruct + i] = Fraction(1)
        T.append(row)
    basis = [nstruct + i for i in range(m)]

    phase1 = [Fraction(0)] * nstruct + [Fraction(1)] * m
    _run(T, basis, phase1, [True] * total)
    if sum(T[i][-1] for i, b in enumerate(basis) if b >= nstruct) != 0:
        return LPResult(INFEASIBLE)

    # drive artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= nstruct:
            j = next((j for j in range(nstruct) if T[i][j] != 0), None)
            if j is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, j)
        i += 1

    cost = c + [-v for v in c] + [Fraction(0)] * n_slack + [Fraction(0)] * m
    allowed = [True] * nstruct + [False] * m
    if not _run(T, basis, cost, allowed):
        return LPResult(UNBOUNDED)
    y = [Fraction(0)] * total
    for i, b in enumerate(basis):
        y[b] = T[i][-1]
    x = tuple(y[j] - y[n + j] for j in range(n))
    return LPResult(OPTIMAL, x, sum(ci * xi for ci, xi in zip(c, x)))


def feasible_point(
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    nvars: int = 0,
) -> tuple[Fraction, ...] | None:
    res = linprog([0] * nvars, A_ub, b_ub, A_eq, b_eq, nvars=nvars)
    return res.x if res.status == OPTIMAL else None


def sign_feasible(normals: Sequence[Sequence], signs: Sequence[int], dim: int):
    """A direction d with sign(n_i·d) = signs[i] for every i, or None.

    The system is homogeneous, so strict inequalities are scaled to margin 1.
    """
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for nv, s in zip(normals, signs):
        if s == 0:
            A_eq.append(list(nv))
            b_eq.append(0)
        elif s > 0:
            A_ub.append([-v for v in nv])
            b_ub.append(-1)
        else:
            A_ub.append(list(nv))
            b_ub.append(-1)
    return feasible_point(A_ub, b_ub, A_eq, b_eq, nvars=dim)
