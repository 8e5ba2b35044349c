"""Lattices, normal forms and finite abelian groups over the integers."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import floor, ceil, prod
from typing import Callable, Iterator, Sequence

from . import exactlp
from .errors import InputError
from .linalg import IntegerMatrix, as_matrix, det, maximal_minors, rank, solve


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
    if a < 0:
        a, x, y = -a, -x, -y
    return x, y, a


# -- normal forms --------------------------------------------------------------


def hermite_normal_form(A) -> tuple[IntegerMatrix, IntegerMatrix]:
    """Column-style Hermite normal form.

    Returns ``(H, U)`` with ``H = A @ U``, ``U`` unimodular and ``H`` lower
    triangular echelon: pivots strictly increase in row index, pivots are
    positive, entries left of a pivot lie in ``[0, pivot)`` and everything to
    its right is zero. The nonzero columns of ``H`` are determined by the
    column lattice of ``A`` alone.
    """
    A = as_matrix(A)
    r, c = A.shape
    H = [list(row) for row in A.entries]
    U = [[int(i == j) for j in range(c)] for i in range(c)]

    def colop(j1, j2, a, b, cc, d):
        # (col_j1, col_j2) <- (a col_j1 + b col_j2, cc col_j1 + d col_j2)
        for M in (H, U):
            for row in M:
                x, y = row[j1], row[j2]
                row[j1], row[j2] = a * x + b * y, cc * x + d * y

    piv = 0
    for i in range(r):
        if piv == c:
            break
        for j in range(piv + 1, c):
            if H[i][j] == 0:
                continue
            a, b = H[i][piv], H[i][j]
            x, y, g = _xgcd(a, b)
            # new pivot column = x*col_piv + y*col_j, new col_j = -(b/g) col_piv + (a/g) col_j
            colop(piv, j, x, y, -b // g, a // g)
        if H[i][piv] == 0:
            continue
        if H[i][piv] < 0:
            for M in (H, U):
                for row in M:
                    row[piv] = -row[piv]
        p = H[i][piv]
        for j in range(piv):
            q = H[i][j] // p
            if q:
                for M in (H, U):
                    for row in M:
                        row[j] -= q * row[piv]
        piv += 1
    return IntegerMatrix.from_rows(H, c), IntegerMatrix.from_rows(U, c)


def smith_normal_form(A) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Returns ``(D, P, Q)`` with ``D = P @ A @ Q`` diagonal, d1 | d2 | ..., di ≥ 0."""
    A = as_matrix(A)
    r, c = A.shape
    D = [list(row) for row in A.entries]
    P = [[int(i == j) for j in range(r)] for i in range(r)]
    Q = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for M in (D, Q):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        P[dst] = [a + q * b for a, b in zip(P[dst], P[src])]

    def add_col(dst, src, q):
        for M in (D, Q):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(r, c)):
        nz = [(abs(D[i][j]), i, j) for i in range(t, r) for j in range(t, c) if D[i][j]]
        if not nz:
            break
        _, i0, j0 = min(nz)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            clean = True
            for i in range(t + 1, r):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, c):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    clean = clean and D[t][j] == 0
            if not clean:
                cand = [(abs(D[i][t]), i, t) for i in range(t, r) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t, c) if D[t][j]]
                _, i0, j0 = min(cand)
                swap_rows(t, i0)
                swap_cols(t, j0)
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if D[i][j] % D[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            P[t] = [-x for x in P[t]]
    return (
        IntegerMatrix.from_rows(D, c),
        IntegerMatrix.from_rows(P, r),
        IntegerMatrix.from_rows(Q, c),
    )


def invariant_factors(A) -> tuple[int, ...]:
    """Nonzero diagonal of the Smith form (including 1s)."""
    D, _, _ = smith_normal_form(A)
    return tuple(D[i, i] for i in range(min(D.shape)) if D[i, i] != 0)


# -- finite abelian groups -----------------------------------------------------


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """⊕ Z/d_i in invariant-factor form (each d_i ≥ 2, d_i | d_{i+1})."""

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        f = tuple(int(d) for d in self.invariant_factors)
        if any(d < 2 for d in f):
            raise InputError(f"invariant factors must be >= 2: {f}")
        if any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise InputError(f"invariant factors must form a divisibility chain: {f}")
        object.__setattr__(self, "invariant_factors", f)

    @classmethod
    def from_factors(cls, factors: Sequence[int]) -> "FiniteAbelianGroup":
        """Any list of cyclic orders, normalised to invariant-factor form."""
        factors = [int(d) for d in factors if int(d) != 1]
        if not factors:
            return cls(())
        D, _, _ = smith_normal_form(IntegerMatrix.from_rows(
            [[d if i == j else 0 for j in range(len(factors))] for i, d in enumerate(factors)]))
        return cls(tuple(D[i, i] for i in range(len(factors)) if D[i, i] > 1))

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @staticmethod
    def presentation(factors: Sequence[int]) -> "tuple[FiniteAbelianGroup, Callable]":
        """⊕ Z/f_i in invariant-factor form, with the map from tuples over the f_i."""
        factors = [int(f) for f in factors]
        if any(f < 1 for f in factors):
            raise InputError(f"cyclic orders must be positive: {factors}")
        if not factors:
            return FiniteAbelianGroup(()), lambda g: ()
        k = len(factors)
        co = cokernel(IntegerMatrix.from_rows(
            [[f if i == j else 0 for j in range(k)] for i, f in enumerate(factors)], k))

        def convert(g):
            g = tuple(int(x) for x in g)
            if len(g) != k:
                raise InputError(f"element {g} has wrong length for {factors}")
            return co(g)

        return co.torsion, convert

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def normalize(self, g: Sequence[int]) -> tuple[int, ...]:
        if len(g) != self.rank:
            raise InputError(f"element {tuple(g)} has wrong length for {self}")
        return tuple(int(x) % d for x, d in zip(g, self.invariant_factors))

    def add(self, g, h) -> tuple[int, ...]:
        return self.normalize([a + b for a, b in zip(g, h)])

    def neg(self, g) -> tuple[int, ...]:
        return self.normalize([-a for a in g])

    def scale(self, k: int, g) -> tuple[int, ...]:
        return self.normalize([k * a for a in g])

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)


# -- lattices --------------------------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """Sublattice of Z^n spanned by the (independent) columns of ``basis``."""

    basis: IntegerMatrix

    def __post_init__(self):
        b = as_matrix(self.basis)
        object.__setattr__(self, "basis", b)
        if b.cols and rank(b.entries, b.cols) != b.cols:
            raise InputError("lattice basis columns are linearly dependent")

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[int]], ambient: int | None = None) -> "Lattice":
        vectors = [tuple(v) for v in vectors]
        n = ambient if ambient is not None else len(vectors[0])
        return cls(IntegerMatrix.from_columns(vectors, n))

    @classmethod
    def zero(cls, n: int) -> "Lattice":
        return cls(IntegerMatrix.zeros(n, 0))

    @classmethod
    def span(cls, vectors: Sequence[Sequence[int]], ambient: int) -> "Lattice":
        """Lattice generated by possibly dependent vectors."""
        if not vectors:
            return cls.zero(ambient)
        H, _ = hermite_normal_form(IntegerMatrix.from_columns(vectors, ambient))
        cols = [c for c in H.columns() if any(c)]
        return cls(IntegerMatrix.from_columns(cols, ambient))

    @property
    def ambient_rank(self) -> int:
        return self.basis.rows

    @property
    def rank(self) -> int:
        return self.basis.cols

    def vectors(self) -> list[tuple[int, ...]]:
        return self.basis.columns()

    def hnf(self) -> IntegerMatrix:
        H, _ = hermite_normal_form(self.basis)
        return H

    def canonical(self) -> "Lattice":
        return Lattice(self.hnf())

    def same_as(self, other: "Lattice") -> bool:
        return self.ambient_rank == other.ambient_rank and self.hnf() == other.hnf()

    def coordinates(self, v: Sequence[int]) -> tuple[Fraction, ...] | None:
        """Rational coordinates of v in the basis, or None if v ∉ span_Q."""
        if self.rank == 0:
            return () if not any(v) else None
        x = solve(self.basis.entries, list(v))
        if x is None:
            return None
        return tuple(x)

    def contains(self, v: Sequence[int]) -> bool:
        x = self.coordinates(v)
        return x is not None and all(c.denominator == 1 for c in x)

    def point(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        return self.basis @ tuple(coeffs)

    def to_json(self) -> dict:
        return {"ambient_rank": self.ambient_rank, "basis": self.basis.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "Lattice":
        return cls(IntegerMatrix.from_json(data["basis"]))


def kernel_basis(A) -> Lattice:
    """Saturated Z-basis of {v : A v = 0}, in canonical echelon form."""
    A = as_matrix(A)
    H, U = hermite_normal_form(A)
    cols = [U.column(j) for j in range(A.cols) if not any(H.column(j))]
    if not cols:
        return Lattice.zero(A.cols)
    return Lattice(IntegerMatrix.from_columns(cols, A.cols)).canonical()


def image_lattice(A) -> Lattice:
    A = as_matrix(A)
    return Lattice.span(A.columns(), A.rows)


def is_unimodular(B) -> bool:
    """True iff every maximal minor of B lies in {0, 1, -1}."""
    B = as_matrix(B)
    if B.cols and rank(B.entries, B.cols) != B.cols:
        raise InputError("is_unimodular needs linearly independent columns")
    return all(m in (0, 1, -1) for m in maximal_minors(B))


def lawrence_lift(L: Lattice) -> Lattice:
    """Λ(L) = {(u, -u) : u ∈ L} inside Z^{2n}."""
    n = L.ambient_rank
    cols = [tuple(b) + tuple(-x for x in b) for b in L.vectors()]
    if not cols:
        return Lattice.zero(2 * n)
    return Lattice(IntegerMatrix.from_columns(cols, 2 * n))


@dataclass(frozen=True)
class Cokernel:
    """Z^n / Im(M) ≅ torsion ⊕ Z^free_rank with an explicit projection.

    ``matrix`` has one row per torsion factor (entries reduced mod the factor)
    followed by ``free_rank`` rows spanning the left kernel of M.
    """

    torsion: FiniteAbelianGroup
    free_rank: int
    matrix: IntegerMatrix

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        img = self.matrix @ tuple(v)
        k = self.torsion.rank
        return self.torsion.normalize(img[:k]) + tuple(img[k:])

    def add(self, a, b):
        k = self.torsion.rank
        return self.torsion.add(a[:k], b[:k]) + tuple(x + y for x, y in zip(a[k:], b[k:]))

    def neg(self, a):
        k = self.torsion.rank
        return self.torsion.neg(a[:k]) + tuple(-x for x in a[k:])

    def describe(self) -> dict:
        return {
            "torsion": list(self.torsion.invariant_factors),
            "free_rank": self.free_rank,
            "pi": self.matrix.tolist(),
        }


def cokernel(M) -> Cokernel:
    M = as_matrix(M)
    n = M.rows
    D, P, _ = smith_normal_form(M)
    diag = [D[i, i] for i in range(min(D.shape))]
    r = sum(1 for d in diag if d)
    tors_rows, factors = [], []
    for i in range(r):
        if diag[i] > 1:
            factors.append(diag[i])
            tors_rows.append([x % diag[i] for x in P.row(i)])
    left = kernel_basis(M.T) if M.cols else Lattice(IntegerMatrix.identity(n))
    free_rows = [list(v) for v in left.vectors()]
    rows = tors_rows + free_rows
    mat = IntegerMatrix.from_rows(rows, n) if rows else IntegerMatrix.zeros(0, n)
    return Cokernel(FiniteAbelianGroup(tuple(factors)), len(free_rows), mat)


@dataclass(frozen=True)
class CosetLabeling:
    """The quotient map L → L/L̃ written on basis coefficients of L."""

    lattice: Lattice
    group: FiniteAbelianGroup
    matrix: IntegerMatrix  # rank(group) × rank(L), rows reduced mod factors

    def of_coefficients(self, c: Sequence[int]) -> tuple[int, ...]:
        if self.group.rank == 0:
            return ()
        return self.group.normalize(self.matrix @ tuple(c))

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        c = self.lattice.coordinates(v)
        if c is None or any(x.denominator != 1 for x in c):
            raise InputError(f"{tuple(v)} is not in the lattice")
        return self.of_coefficients([int(x) for x in c])


@dataclass(frozen=True)
class CofiniteSublattice:
    sublattice: Lattice  # ambient basis of L̃
    coefficients: IntegerMatrix  # basis of L̃ in coefficients of L (m × m)
    labeling: CosetLabeling


def cofinite_sublattice(L: Lattice, G: FiniteAbelianGroup, images: Sequence[Sequence[int]]) -> CofiniteSublattice:
    """Kernel of the homomorphism L → G sending basis vector j to images[j]."""
    m, k = L.rank, G.rank
    if len(images) != m:
        raise InputError(f"need one group element per basis vector ({m}), got {len(images)}")
    imgs = [G.normalize(g) for g in images]
    if k == 0:
        C = IntegerMatrix.identity(m)
        lab = CosetLabeling(L, G, IntegerMatrix.zeros(0, m))
        return CofiniteSublattice(L, C, lab)
    Mrows = [[imgs[j][i] for j in range(m)] for i in range(k)]
    big = [Mrows[i] + [G.invariant_factors[i] if t == i else 0 for t in range(k)] for i in range(k)]
    K = kernel_basis(IntegerMatrix.from_rows(big, m + k))
    coeff_vectors = [v[:m] for v in K.vectors()]
    C = Lattice.span(coeff_vectors, m).hnf()
    index = abs(det([C.row(i) for i in range(m)]))
    if index != G.order:
        raise InputError(
            f"map onto {G} is not surjective: image has order {index}, group has order {G.order}"
        )
    sub = Lattice(L.basis @ C)
    lab = CosetLabeling(L, G, IntegerMatrix.from_rows(Mrows, m))
    return CofiniteSublattice(sub, C, lab)


class NotSublatticeError(InputError):
    pass


class InfiniteIndexError(InputError):
    pass


def quotient_group(L: Lattice, Lt: Lattice) -> CosetLabeling:
    """L/L̃ in invariant-factor form together with the labelling L → L/L̃."""
    m = L.rank
    cols = []
    for v in Lt.vectors():
        c = L.coordinates(v)
        if c is None or any(x.denominator != 1 for x in c):
            raise NotSublatticeError(f"{v} lies in the sublattice but not in L")
        cols.append([int(x) for x in c])
    if len(cols) < m or (cols and rank(IntegerMatrix.from_columns(cols, m).entries, len(cols)) < m):
        raise InfiniteIndexError("sublattice has smaller rank: infinite index")
    if m == 0:
        return CosetLabeling(L, FiniteAbelianGroup(()), IntegerMatrix.zeros(0, 0))
    C = IntegerMatrix.from_columns(cols, m)
    D, P, _ = smith_normal_form(C)
    rows, factors = [], []
    for i in range(m):
        if D[i, i] > 1:
            factors.append(D[i, i])
            rows.append([x % D[i, i] for x in P.row(i)])
    G = FiniteAbelianGroup(tuple(factors))
    mat = IntegerMatrix.from_rows(rows, m) if rows else IntegerMatrix.zeros(0, m)
    return CosetLabeling(L, G, mat)


# -- lattice points in boxes ---------------------------------------------------------


def coefficient_bounds(B: IntegerMatrix, lo: Sequence, hi: Sequence) -> list[tuple[int, int]] | None:
    """Integer bounds on each coefficient c_j over the rational polytope lo ≤ B c ≤ hi.

    Uses the exact LP relaxation: min and max of each c_j. None when the
    relaxation is empty. B must have independent columns, so the polytope is
    bounded.
    """
    m = B.cols
    A_ub = [list(r) for r in B.entries] + [[-x for x in r] for r in B.entries]
    b_ub = list(hi) + [-x for x in lo]
    bounds = []
    for j in range(m):
        e = [0] * m
        e[j] = 1
        low = exactlp.linprog(e, A_ub, b_ub, nvars=m)
        if low.status == exactlp.INFEASIBLE:
            return None
        high = exactlp.linprog([-x for x in e], A_ub, b_ub, nvars=m)
        bounds.append((ceil(low.value), floor(-high.value)))
    return bounds


def lattice_points_in_box(L: Lattice, lo: Sequence[int], hi: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Every u ∈ L with lo ≤ u ≤ hi componentwise, in coefficient-lexicographic order."""
    if any(a > b for a, b in zip(lo, hi)):
        return
    if L.rank == 0:
        z = (0,) * L.ambient_rank
        if all(a <= 0 <= b for a, b in zip(lo, hi)):
            yield z
        return
    bounds = coefficient_bounds(L.basis, lo, hi)
    if bounds is None:
        return
    for c in itertools.product(*(range(a, b + 1) for a, b in bounds)):
        u = L.basis @ c
        if all(a <= x <= b for a, x, b in zip(lo, u, hi)):
            yield u


def box_lattice_point(L: Lattice, lo: Sequence[int], hi: Sequence[int]) -> tuple[int, ...] | None:
    """Some u ∈ L inside the box, preferring 0, or None (a proof of emptiness)."""
    if all(a <= 0 <= b for a, b in zip(lo, hi)):
        return (0,) * L.ambient_rank
    return next(lattice_points_in_box(L, lo, hi), None)
