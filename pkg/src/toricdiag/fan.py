"""Fans, class groups, irrelevant ideals and cone-level tests."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Sequence

from . import exactlp
from .errors import InputError
from .lattice import Cokernel, Lattice, cokernel, is_unimodular, smith_normal_form
from .linalg import IntegerMatrix, det, integer_scale, nullspace, rank, solve


@dataclass(frozen=True)
class Fan:
    """Rays in Z^d plus maximal cones given as sets of ray indices.

    Rays that lie in no maximal cone are kept; they form ``I_empty`` and still
    contribute a homogeneous coordinate.
    """

    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(tuple(sorted(set(int(i) for i in c))) for c in self.max_cones)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", cones)
        if self.dim < 1:
            raise InputError("fan dimension must be positive")
        for r in rays:
            if len(r) != self.dim:
                raise InputError(f"ray {r} does not live in Z^{self.dim}")
            g = 0
            for x in r:
                g = gcd(g, x)
            if g != 1:
                raise InputError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise InputError("repeated ray")
        for c in cones:
            if any(i < 0 or i >= len(rays) for i in c):
                raise InputError(f"cone {list(c)} refers to a missing ray")
        for a, b in itertools.permutations(cones, 2):
            if set(a) <= set(b):
                raise InputError(f"cone {list(a)} is contained in cone {list(b)}")

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "Fan":
        try:
            return cls(int(data["dim"]), data["rays"], data["max_cones"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed fan description: {exc}") from None

    @classmethod
    def load(cls, path) -> "Fan":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
        }

    # -- basic data -------------------------------------------------------------

    @property
    def nrays(self) -> int:
        return len(self.rays)

    @property
    def I_empty(self) -> tuple[int, ...]:
        used = set(itertools.chain.from_iterable(self.max_cones))
        return tuple(i for i in range(self.nrays) if i not in used)

    @property
    def ray_matrix(self) -> IntegerMatrix:
        """The n×d matrix B whose rows are the rays."""
        return IntegerMatrix.from_rows(self.rays, self.dim)

    def cone_rays(self, cone: Sequence[int]) -> list[tuple[int, ...]]:
        return [self.rays[i] for i in cone]

    def spans(self) -> bool:
        return rank(self.rays, self.dim) == self.dim if self.rays else False


# -- class group and principal divisors ---------------------------------------------


def class_group(fan: Fan) -> Cokernel:
    """Cl = Z^n / Im(B) with the projection π as ``.matrix``."""
    if not fan.spans():
        raise InputError("rays do not span: the variety has a torus factor")
    return cokernel(fan.ray_matrix)


def principal_lattice(fan: Fan) -> Lattice:
    """L = Im(B) = ker(π), with the columns of B as basis."""
    if not fan.spans():
        raise InputError("rays do not span: the variety has a torus factor")
    return Lattice(fan.ray_matrix)


# -- cone tests -----------------------------------------------------------------------


def is_simplicial(fan: Fan) -> bool:
    return all(rank(fan.cone_rays(c), fan.dim) == len(c) for c in fan.max_cones)


def is_smooth(fan: Fan) -> bool:
    """Each maximal cone's rays are part of a Z-basis of Z^d."""
    if not is_simplicial(fan):
        return False
    for c in fan.max_cones:
        D, _, _ = smith_normal_form(IntegerMatrix.from_columns(fan.cone_rays(c), fan.dim))
        if any(D[i, i] != 1 for i in range(len(c))):
            return False
    return True


def cone_facets(fan: Fan, cone: Sequence[int]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Facets of a full-dimensional cone as (ray subset, inward normal)."""
    d = fan.dim
    rays = {i: fan.rays[i] for i in cone}
    found = {}
    for sub in itertools.combinations(cone, d - 1):
        if rank([rays[i] for i in sub], d) != d - 1:
            continue
        if d == 1:
            normal = (1,)
        else:
            normal = integer_scale(nullspace([rays[i] for i in sub], d)[0])
        vals = [sum(a * b for a, b in zip(normal, rays[i])) for i in cone]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            normal = tuple(-x for x in normal)
        else:
            continue
        face = tuple(i for i in cone if sum(a * b for a, b in zip(normal, rays[i])) == 0)
        found.setdefault(face, normal)
    return sorted(found.items())


def is_complete(fan: Fan) -> bool:
    """Support is all of R^d, tested by facet pairing.

    Every maximal cone must be full-dimensional and every facet must be shared
    by exactly two maximal cones lying on opposite sides of it. For a fan this
    makes the support open and closed in R^d minus the origin.
    """
    d = fan.dim
    if not fan.max_cones or not fan.spans():
        return False
    sides: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for c in fan.max_cones:
        if rank(fan.cone_rays(c), d) != d:
            return False
        for face, normal in cone_facets(fan, c):
            sides.setdefault(face, []).append(normal)
    for face, normals in sides.items():
        if len(normals) != 2:
            return False
        a, b = normals
        if a != tuple(-x for x in b):
            return False
    return True


def affine_chart_check(fan: Fan) -> list[bool | None]:
    """Per maximal cone: True iff it is full-dimensional with determinant ±1.

    Lower-dimensional cones give None.
    """
    out = []
    for c in fan.max_cones:
        if len(c) != fan.dim or rank(fan.cone_rays(c), fan.dim) != fan.dim:
            out.append(None)
        else:
            out.append(abs(det(fan.cone_rays(c))) == 1)
    return out


def smooth_simplicial_complete_checks(fan: Fan) -> dict:
    return {
        "smooth": is_smooth(fan),
        "simplicial": is_simplicial(fan),
        "complete": is_complete(fan),
    }


# -- irrelevant ideals ------------------------------------------------------------------


@dataclass(frozen=True)
class SquarefreeMonomialIdeal:
    nvars: int
    generators: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        for g in gens:
            if len(g) != self.nvars or any(x not in (0, 1) for x in g):
                raise InputError(f"generator {g} is not a squarefree exponent vector")
        object.__setattr__(self, "generators", gens)

    def contains(self, exponent: Sequence[int]) -> bool:
        return any(all(e >= g for e, g in zip(exponent, gen)) for gen in self.generators)

    def minimal_generators(self) -> tuple[tuple[int, ...], ...]:
        gens = list(dict.fromkeys(self.generators))
        keep = [
            g for g in gens
            if not any(h != g and all(a <= b for a, b in zip(h, g)) for h in gens)
        ]
        return tuple(keep)

    def format_generator(self, g: Sequence[int]) -> str:
        names = self.names or tuple(f"z{i + 1}" for i in range(self.nvars))
        parts = [names[i] for i, e in enumerate(g) if e]
        return "*".join(parts) if parts else "1"

    def __str__(self) -> str:
        return "<" + ", ".join(self.format_generator(g) for g in self.generators) + ">"


def variable_names(n: int, product: bool) -> tuple[str, ...]:
    xs = tuple(f"x{i + 1}" for i in range(n))
    return xs + tuple(f"y{i + 1}" for i in range(n)) if product else xs


def irrelevant_ideal(fan: Fan, product: bool = False) -> SquarefreeMonomialIdeal:
    """Generators prod_{ρ∉σ} x_ρ per maximal cone (so I_empty variables divide all of them).

    With ``product`` the ideal lives on X×X in variables x_1..x_n, y_1..y_n and
    has the pairwise products x^σ̂₁ y^σ̂₂ as generators.
    """
    n = fan.nrays
    single = [tuple(0 if i in c else 1 for i in range(n)) for c in fan.max_cones]
    if not product:
        return SquarefreeMonomialIdeal(n, tuple(single), variable_names(n, False))
    gens = tuple(a + b for a in single for b in single)
    return SquarefreeMonomialIdeal(2 * n, gens, variable_names(n, True))


# -- functionals ---------------------------------------------------------------------------


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def separation_functional(fan: Fan, sigma1: Sequence[int], sigma2: Sequence[int]) -> tuple[int, ...]:
    """Integer u with u = 0 on shared rays, > 0 on σ1∖σ2 and < 0 on σ2∖σ1.

    Minimises the L1 norm of u over the margin-1 polytope, then rescales to
    a primitive integer vector.
    """
    s1, s2 = set(sigma1), set(sigma2)
    common, only1, only2 = sorted(s1 & s2), sorted(s1 - s2), sorted(s2 - s1)
    d = fan.dim
    if not only1 and not only2:
        return (0,) * d
    # variables: u (d, free) then t (d) with t ≥ |u|
    nv = 2 * d
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i in only1:
        A_ub.append([-x for x in fan.rays[i]] + [0] * d)
        b_ub.append(-1)
    for i in only2:
        A_ub.append(list(fan.rays[i]) + [0] * d)
        b_ub.append(-1)
    for i in common:
        A_eq.append(list(fan.rays[i]) + [0] * d)
        b_eq.append(0)
    for j in range(d):
        row = [0] * nv
        row[j], row[d + j] = 1, -1
        A_ub.append(row)
        b_ub.append(0)
        row = [0] * nv
        row[j], row[d + j] = -1, -1
        A_ub.append(row)
        b_ub.append(0)
    res = exactlp.linprog([0] * d + [1] * d, A_ub, b_ub, A_eq, b_eq, nvars=nv)
    if res.status != exactlp.OPTIMAL:
        raise InputError(f"cones {sorted(s1)} and {sorted(s2)} are not separated along a common face")
    u = integer_scale(res.x[:d])
    assert all(_dot(u, fan.rays[i]) > 0 for i in only1)
    assert all(_dot(u, fan.rays[i]) < 0 for i in only2)
    assert all(_dot(u, fan.rays[i]) == 0 for i in common)
    return u


def fano_support_vector(fan: Fan, sigma: Sequence[int]) -> tuple[int, ...] | None:
    """v = B·m in L with v_ρ = -1 on σ(1) and v_ρ ≥ 0 elsewhere, or None.

    For a smooth full-dimensional σ the conditions on σ(1) determine m, so
    existence is decided exactly.
    """
    sigma = sorted(sigma)
    if len(sigma) != fan.dim:
        raise InputError(f"cone {sigma} is not full-dimensional")
    m = solve([fan.rays[i] for i in sigma], [-1] * len(sigma))
    if m is None or any(Fraction(x).denominator != 1 for x in m):
        return None
    m = [int(x) for x in m]
    v = tuple(_dot(m, r) for r in fan.rays)
    if any(v[i] < 0 for i in range(fan.nrays) if i not in sigma):
        return None
    return v


def fan_report(fan: Fan) -> dict:
    checks = smooth_simplicial_complete_checks(fan)
    report = dict(checks)
    if fan.spans():
        cl = class_group(fan)
        report["unimodular"] = is_unimodular(fan.ray_matrix)
        report["class_group"] = cl.describe()
    else:
        report["unimodular"] = None
        report["class_group"] = None
    fano = []
    for c in fan.max_cones:
        if checks["smooth"] and len(c) == fan.dim:
            v = fano_support_vector(fan, c)
            fano.append(list(v) if v is not None else None)
        else:
            fano.append(None)
    report["fano_per_cone"] = fano
    report["affine_charts"] = affine_chart_check(fan)
    report["I_empty"] = list(fan.I_empty)
    return report


CORPUS_DIR = Path(__file__).with_name("corpus")


def corpus_names() -> list[str]:
    return sorted(p.stem for p in CORPUS_DIR.glob("*.json"))


def load_corpus(name: str) -> dict:
    path = CORPUS_DIR / f"{name}.json"
    if not path.exists():
        raise InputError(f"no corpus entry named {name!r}; known: {', '.join(corpus_names())}")
    with open(path) as fh:
        return json.load(fh)


def corpus_fan(name: str) -> Fan:
    return Fan.from_dict(load_corpus(name))
