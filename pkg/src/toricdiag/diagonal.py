"""Membership in the lattice module, binomial generators and torsion certificates.

A Laurent monomial x^a y^b is stored as its exponent w = (a, b) in Z^{2n}.
It lies in the lattice module M iff w >= (u, -u) for some u in L, which is a
lattice-point-in-box question: -b <= u <= a.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Sequence

from .arrangement import QuotientComplex, parse_rational
from .errors import InputError
from .fan import Fan, SquarefreeMonomialIdeal, fano_support_vector
from .lattice import Lattice, box_lattice_point, lawrence_lift
from .linalg import solve

DEFAULT_KMAX = 16


def lattice_module_witness(w: Sequence[int], L: Lattice) -> tuple[int, ...] | None:
    """Some u in L with w >= (u, -u), or None when w is not in M."""
    n = L.ambient_rank
    if len(w) != 2 * n:
        raise InputError(f"exponent has length {len(w)}, expected {2 * n}")
    wx, wy = w[:n], w[n:]
    return box_lattice_point(L, [-y for y in wy], list(wx))


def in_lattice_module(w: Sequence[int], L: Lattice) -> bool:
    return lattice_module_witness(w, L) is not None


def lattice_monomial(u: Sequence[int]) -> tuple[int, ...]:
    """Exponent of x^u y^{-u}."""
    return tuple(u) + tuple(-x for x in u)


# -- binomials ------------------------------------------------------------------------


@dataclass(frozen=True)
class Binomial:
    """z^plus - z^minus over a fixed list of variables."""

    plus: tuple[int, ...]
    minus: tuple[int, ...]

    def normalized(self) -> "Binomial":
        """Orientation-free form: the lexicographically larger term first."""
        return self if self.plus >= self.minus else Binomial(self.minus, self.plus)

    def format(self, names: Sequence[str]) -> str:
        def mono(e):
            parts = []
            for name, k in zip(names, e):
                if k == 1:
                    parts.append(name)
                elif k > 1:
                    parts.append(f"{name}^{k}")
            return "*".join(parts) or "1"

        return f"{mono(self.plus)} - {mono(self.minus)}"


def _split(v):
    return tuple(max(x, 0) for x in v), tuple(max(-x, 0) for x in v)


def binomial_generators(vectors: Sequence[Sequence[int]], mode: str = "I_L") -> list[Binomial]:
    """Binomials attached to the given lattice vectors, without saturation.

    ``I_L``: x^{v+} - x^{v-}. ``J_L``: x^{v+} y^{v-} - x^{v-} y^{v+}.
    ``I_Lambda``: the I_L rule applied to (v, -v) in 2n variables.
    """
    out = []
    for v in vectors:
        v = tuple(int(x) for x in v)
        plus, minus = _split(v)
        if mode == "I_L":
            out.append(Binomial(plus, minus))
        elif mode == "J_L":
            out.append(Binomial(plus + minus, minus + plus))
        elif mode == "I_Lambda":
            p2, m2 = _split(lattice_monomial(v))
            out.append(Binomial(p2, m2))
        else:
            raise InputError(f"unknown binomial mode {mode!r}")
    return out


def lawrence_equals_lattice_ideal_check(vectors: Sequence[Sequence[int]]) -> bool:
    """The I_L rule on the lifted vectors (u, -u) reproduces the J_L generators."""
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return True
    n = len(vectors[0])
    lifted = lawrence_lift(Lattice.from_vectors(vectors, n)).vectors() if _independent(vectors) else [
        lattice_monomial(v) for v in vectors]
    left = {b.normalized() for b in binomial_generators(lifted, "I_L")}
    right = {b.normalized() for b in binomial_generators(vectors, "J_L")}
    return left == right


def _independent(vectors) -> bool:
    from .linalg import rank
    return rank(vectors, len(vectors[0])) == len(vectors)


# -- images and cokernels ---------------------------------------------------------------------


def image_monomials(qc: QuotientComplex) -> list[tuple[int, ...]]:
    """Vertex labels of the quotient: generators of the image modulo translation."""
    return sorted({v.label for v in qc.cells[0]})


def cokernel_extra_monomials(qc: QuotientComplex, L: Lattice) -> list[tuple[int, ...]]:
    return [w for w in image_monomials(qc) if not in_lattice_module(w, L)]


@dataclass
class TorsionCertificate:
    monomial: tuple[int, ...]
    entries: list = field(default_factory=list)  # (generator, k, witness u)
    failures: list = field(default_factory=list)  # generators that exhausted k_max
    k_max: int = DEFAULT_KMAX

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def k(self) -> int:
        return max((k for _, k, _ in self.entries), default=1)

    @property
    def degenerate(self) -> bool:
        """True when the monomial is already in M, so every k is 1 for free."""
        return bool(self.entries) and all(
            u is not None and all(a >= b for a, b in zip(self.monomial, lattice_monomial(u)))
            for _, _, u in self.entries
        )

    def to_json(self) -> dict:
        return {
            "monomial": list(self.monomial),
            "ok": self.ok,
            "k": self.k if self.ok else None,
            "degenerate": self.degenerate,
            "generators": [
                {"generator": list(g), "k": k, "witness": list(u)} for g, k, u in self.entries
            ],
            "failures": [list(g) for g in self.failures],
            "k_max": self.k_max,
        }


def torsion_certificate(m: Sequence[int], ideal: SquarefreeMonomialIdeal | Sequence[Sequence[int]],
                        L: Lattice, k_max: int = DEFAULT_KMAX) -> TorsionCertificate:
    """Smallest k <= k_max per generator g with g^k · m in M, with its lattice witness."""
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    gens = ideal.generators if isinstance(ideal, SquarefreeMonomialIdeal) else [tuple(g) for g in ideal]
    m = tuple(int(x) for x in m)
    cert = TorsionCertificate(m, k_max=k_max)
    for g in gens:
        if len(g) != len(m):
            raise InputError("generator and monomial live in different rings")
        for k in range(1, k_max + 1):
            w = tuple(a + k * b for a, b in zip(m, g))
            u = lattice_module_witness(w, L)
            if u is not None:
                cert.entries.append((tuple(g), k, u))
                break
        else:
            cert.failures.append(tuple(g))
    return cert


def verify_witness(m: Sequence[int], g: Sequence[int], k: int, u: Sequence[int]) -> bool:
    """g^k · m / (x^u y^-u) has nonnegative exponents."""
    return all(a + k * b - c >= 0 for a, b, c in zip(m, g, lattice_monomial(u)))


# -- floor shifts and v_sigma ------------------------------------------------------------------------


def floor_label(p: Sequence[Fraction]) -> tuple[int, ...]:
    return lattice_monomial([floor(x) for x in p])


def floor_shift_check(p: Sequence, v: Sequence[int]) -> bool:
    """⌊p + v⌋ = ⌊p⌋ + v, and the labels multiply: m_{p+v} = m_p · m_v."""
    p = [parse_rational(x) for x in p]
    v = [int(x) for x in v]
    shifted = [floor(a + b) for a, b in zip(p, v)]
    if shifted != [floor(a) + b for a, b in zip(p, v)]:
        return False
    lhs = floor_label([a + b for a, b in zip(p, v)])
    rhs = tuple(a + b for a, b in zip(floor_label(p), lattice_monomial(v)))
    return lhs == rhs


@dataclass
class VSigmaResult:
    vector: tuple[int, ...] | None
    method: str
    bounds: dict


def _pattern_ok(q, sigma) -> bool:
    return all((x < 0) if i in sigma else (x > 0) for i, x in enumerate(q))


def v_sigma_finder(p: Sequence, fan: Fan, sigma: Sequence[int], search: int = 20, box: int = 6) -> VSigmaResult:
    """v in L with (p + v)_ρ < 0 exactly on σ(1) and > 0 on every other ray.

    First tries r·v + k·ṽ with v the Fano support vector of σ and ṽ the lattice
    vector bringing the σ(1)-coordinates of p into [0, 1); then falls back to
    v = B·m over the box |m| <= ``box``.
    """
    p = [parse_rational(x) for x in p]
    sigma = set(sigma)
    B = fan.ray_matrix
    bounds = {"r_k": search, "m_box": box}
    v = fano_support_vector(fan, sorted(sigma))
    if v is not None:
        idx = sorted(sigma)
        m_t = solve([fan.rays[i] for i in idx], [-floor(p[i]) for i in idx])
        if m_t is not None and all(x.denominator == 1 for x in m_t):
            vt = B @ tuple(int(x) for x in m_t)
            for total in range(0, 2 * search + 1):
                for r in range(-search, search + 1):
                    k = total - abs(r)
                    for kk in {k, -k}:
                        if abs(kk) > search or k < 0:
                            continue
                        cand = tuple(r * a + kk * b for a, b in zip(v, vt))
                        if _pattern_ok([x + c for x, c in zip(p, cand)], sigma):
                            return VSigmaResult(cand, "fano", bounds)
    import itertools

    best = None
    for m in itertools.product(range(-box, box + 1), repeat=fan.dim):
        cand = B @ m
        if _pattern_ok([x + c for x, c in zip(p, cand)], sigma):
            key = (sum(abs(x) for x in m), m)
            if best is None or key < best[0]:
                best = (key, cand)
    if best is not None:
        return VSigmaResult(best[1], "search", bounds)
    return VSigmaResult(None, "none", bounds)
