"""Line bundle cohomology on the weighted projective line P(a, b).

Everything is read off the graded ring k[z1, z2] with deg z1 = a and
deg z2 = b. Sections of O(n) over the two standard charts are the degree-n
Laurent monomials with j >= 0 (chart z1 != 0) or i >= 0 (chart z2 != 0).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import InputError
from .linalg import sparse_rank


@dataclass(frozen=True)
class WeightedProjLine:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise InputError(f"weights must be positive, got ({self.a}, {self.b})")
        if gcd(self.a, self.b) != 1:
            raise InputError(f"weights ({self.a}, {self.b}) are not coprime")

    @property
    def weights(self) -> tuple[int, int]:
        return self.a, self.b

    def h_dims(self, n: int) -> tuple[int, int]:
        return h_dims(self.a, self.b, n)


def _line(a: int, b: int, n: int, i_range: range) -> list[tuple[int, int]]:
    """Lattice points (i, j) with a·i + b·j = n and i in the given range."""
    out = []
    for i in i_range:
        r = n - a * i
        if r % b == 0:
            out.append((i, r // b))
    return out


def h_dims(a: int, b: int, n: int) -> tuple[int, int]:
    """(h0, h1) of O(n) by counting monomials.

    h0 counts z1^i z2^j with i, j >= 0 of degree n; h1 counts the Čech classes
    z1^-i z2^-j with i, j >= 1 of degree n.
    """
    WeightedProjLine(a, b)
    h0 = len([p for p in _line(a, b, n, range(0, max(n, 0) // a + 1)) if p[1] >= 0])
    h1 = len([p for p in _line(a, b, -n, range(1, max(-n, 0) // a + 1)) if p[1] >= 1])
    return h0, h1


def cech_oracle(a: int, b: int, n: int) -> tuple[int, int]:
    """(h0, h1) as kernel and cokernel of the Čech differential, by rank.

    C^0 = S[1/z1]_n ⊕ S[1/z2]_n maps to C^1 = S[1/(z1 z2)]_n by (f, g) ↦ f - g.
    All three spaces are infinite; exponents are truncated to |i|, |j| <= T
    with T = max(|n|, a + b) + 4, which contains every monomial that can
    contribute to either kernel or cokernel.
    """
    WeightedProjLine(a, b)
    T = max(abs(n), a + b) + 4
    window = [p for p in _line(a, b, n, range(-T, T + 1)) if abs(p[1]) <= T]
    u1 = [p for p in window if p[1] >= 0]
    u2 = [p for p in window if p[0] >= 0]
    u12 = {p: k for k, p in enumerate(window)}
    rows = [{u12[p]: 1} for p in u1] + [{u12[p]: -1} for p in u2]
    r = sparse_rank(rows)
    return len(rows) - r, len(u12) - r


def ext_dims(a: int, b: int, i_twist: int, j_twist: int) -> list[tuple[int, int]]:
    """Ext^k(O(i), O(j)) = H^k(O(j - i)) as (k, dim) for k = 0, 1."""
    h0, h1 = h_dims(a, b, j_twist - i_twist)
    return [(0, h0), (1, h1)]


@dataclass
class CollectionReport:
    ok: bool
    violations: list

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"exceptional": self.ok, "violations": self.violations}


def exceptional_collection_check(a: int, b: int, twists: Sequence[int]) -> CollectionReport:
    """O(t_1), ..., O(t_r) is exceptional: each End is k, no higher self-Ext, no backward Ext."""
    twists = [int(t) for t in twists]
    if any(s >= t for s, t in zip(twists, twists[1:])):
        raise InputError(f"twists must be strictly increasing: {twists}")
    violations = []
    for t in twists:
        dims = dict(ext_dims(a, b, t, t))
        if dims[0] != 1 or dims[1] != 0:
            violations.append({"kind": "not_exceptional", "from": t, "to": t, "ext": [dims[0], dims[1]]})
    for lo_idx, lo in enumerate(twists):
        for hi in twists[lo_idx + 1:]:
            dims = dict(ext_dims(a, b, hi, lo))
            if dims[0] or dims[1]:
                violations.append({"kind": "backward_ext", "from": hi, "to": lo, "ext": [dims[0], dims[1]]})
    return CollectionReport(not violations, violations)


# -- the Koszul-type sequence ---------------------------------------------------------------------


def _monomials(a: int, b: int, d: int) -> list[tuple[int, int]]:
    if d < 0:
        return []
    return [p for p in _line(a, b, d, range(0, d // a + 1)) if p[1] >= 0]


def koszul_degree_data(a: int, b: int, N: int) -> list[dict]:
    """Per degree d <= N: dimensions and homology of
    0 -> S(-a-b) -> S(-a) ⊕ S(-b) -> S -> 0, with f ↦ (z2 f, -z1 f) and (g, h) ↦ z1 g + z2 h.
    """
    WeightedProjLine(a, b)
    out = []
    for d in range(0, N + 1):
        src = _monomials(a, b, d - a - b)
        mid_g = _monomials(a, b, d - a)
        mid_h = _monomials(a, b, d - b)
        tgt = _monomials(a, b, d)
        mid_index = {("g", p): k for k, p in enumerate(mid_g)}
        mid_index.update({("h", p): len(mid_g) + k for k, p in enumerate(mid_h)})
        tgt_index = {p: k for k, p in enumerate(tgt)}
        d1 = [{mid_index[("g", (i, j + 1))]: 1, mid_index[("h", (i + 1, j))]: -1} for i, j in src]
        d2 = [{tgt_index[(i + 1, j)]: 1} for i, j in mid_g] + [{tgt_index[(i, j + 1)]: 1} for i, j in mid_h]
        r1, r2 = sparse_rank(d1), sparse_rank(d2)
        nmid = len(mid_g) + len(mid_h)
        homology = [len(src) - r1, nmid - r2 - r1, len(tgt) - r2]
        out.append({
            "degree": d,
            "dims": [len(src), nmid, len(tgt)],
            "ranks": [r1, r2],
            "homology": homology,
        })
    return out


def koszul_sequence_check(a: int, b: int, N: int) -> bool:
    """Exact in every degree up to N, except for the copy of k left over in degree 0.

    The cokernel of the last map is S/(z1, z2) = k, which is supported at the
    removed origin and so vanishes as a sheaf.
    """
    for row in koszul_degree_data(a, b, N):
        expect = [0, 0, 1 if row["degree"] == 0 else 0]
        if row["homology"] != expect:
            return False
    return True
