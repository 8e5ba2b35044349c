"""Cellular chain complexes of free modules and their certificates."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import floor
from typing import Sequence

from .arrangement import (
    ArrangementSpec,
    QuotientComplex,
    TranslationLattice,
    build_arrangement,
    format_rational,
)
from .errors import InputError, VerificationError
from .lattice import Cokernel, cokernel
from .linalg import IntegerMatrix, det, inverse, sparse_rank


@dataclass(frozen=True)
class Term:
    i: int  # row: (k-1)-cell
    j: int  # column: k-cell
    sign: int
    exp: tuple[int, ...]


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    terms: tuple[Term, ...]

    def entry(self, i: int, j: int) -> dict:
        """The (i, j) entry as a polynomial {exponent: coefficient}."""
        poly = defaultdict(int)
        for t in self.terms:
            if t.i == i and t.j == j:
                poly[t.exp] += t.sign
        return {e: c for e, c in poly.items() if c}

    def columns(self) -> dict[int, list[Term]]:
        out = defaultdict(list)
        for t in self.terms:
            out[t.j].append(t)
        return out

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [{"i": t.i, "j": t.j, "sign": t.sign, "exp": list(t.exp)} for t in self.terms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SparseMatrix":
        return cls(
            int(data["rows"]),
            int(data["cols"]),
            tuple(Term(int(e["i"]), int(e["j"]), int(e["sign"]), tuple(int(x) for x in e["exp"]))
                  for e in data["entries"]),
        )


@dataclass(frozen=True)
class ChainComplex:
    """Free modules indexed by cells; ``differentials[k-1]`` maps degree k to k-1."""

    nvars: int  # n, so the ring has 2n variables
    ranks: tuple[int, ...]
    differentials: tuple[SparseMatrix, ...]
    labels: tuple[tuple[tuple[int, ...], ...], ...]  # per degree, per summand
    twists: tuple | None = None
    source: dict | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        out = {
            "nvars": self.nvars,
            "ranks": list(self.ranks),
            "differentials": [d.to_json() for d in self.differentials],
            "labels": [[list(x) for x in lab] for lab in self.labels],
            "twists": None if self.twists is None else [[[list(a), list(b)] for a, b in deg] for deg in self.twists],
        }
        if self.source is not None:
            out["source"] = self.source
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ChainComplex":
        try:
            tw = data.get("twists")
            twists = None if tw is None else tuple(
                tuple((tuple(a), tuple(b)) for a, b in deg) for deg in tw)
            return cls(
                int(data["nvars"]),
                tuple(int(r) for r in data["ranks"]),
                tuple(SparseMatrix.from_json(d) for d in data["differentials"]),
                tuple(tuple(tuple(int(x) for x in v) for v in lab) for lab in data["labels"]),
                twists,
                data.get("source"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed chain complex: {exc}") from None


def cellular_differential(qc: QuotientComplex) -> ChainComplex:
    """Entry for a facet G of F: sign times the monomial m_F / m_G."""
    n = qc.spec.n
    diffs = []
    for k in range(1, qc.dim + 1):
        terms = []
        for inc in qc.incidence:
            if inc.dim != k:
                continue
            e = qc.entry_exponent(inc)
            if any(x < 0 for x in e):
                raise VerificationError(
                    f"label of {qc.cells[k - 1][inc.facet].key} does not divide label of {qc.cells[k][inc.cell].key}"
                )
            terms.append(Term(inc.facet, inc.cell, inc.sign, e))
        terms.sort(key=lambda t: (t.j, t.i, t.exp, t.sign))
        diffs.append(SparseMatrix(len(qc.cells[k - 1]), len(qc.cells[k]), tuple(terms)))
    labels = tuple(tuple(c.label for c in cells) for cells in qc.cells)
    return ChainComplex(n, qc.f_vector(), tuple(diffs), labels)


def f_vector(cc: ChainComplex) -> tuple[int, ...]:
    return cc.ranks


def verify_d_squared(cc: ChainComplex) -> bool:
    """All composites of consecutive differentials vanish as polynomial matrices."""
    for k in range(1, len(cc.differentials)):
        lower, upper = cc.differentials[k - 1], cc.differentials[k]
        lower_cols = lower.columns()
        acc = defaultdict(int)
        for t in upper.terms:
            for s in lower_cols.get(t.i, ()):
                e = tuple(a + b for a, b in zip(t.exp, s.exp))
                acc[(s.i, t.j, e)] += t.sign * s.sign
        if any(acc.values()):
            return False
    return True


def flip_sign(cc: ChainComplex, degree: int, term_index: int = 0) -> ChainComplex:
    """Copy of cc with one differential term negated."""
    d = cc.differentials[degree - 1]
    terms = list(d.terms)
    t = terms[term_index]
    terms[term_index] = replace(t, sign=-t.sign)
    diffs = list(cc.differentials)
    diffs[degree - 1] = replace(d, terms=tuple(terms))
    return replace(cc, differentials=tuple(diffs))


def unit_entries(cc: ChainComplex) -> list[tuple[int, int, int]]:
    """(degree, row, col) of constant nonzero entries; empty for a minimal complex."""
    out = []
    for k, d in enumerate(cc.differentials, start=1):
        for (i, j) in {(t.i, t.j) for t in d.terms}:
            poly = d.entry(i, j)
            if poly.get((0,) * (2 * cc.nvars)):
                out.append((k, i, j))
    return sorted(out)


# -- exactness --------------------------------------------------------------------------------


def _join(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _join_closure(labels) -> set:
    closure: set = set()
    for lab in sorted(set(labels)):
        new = {lab}
        for c in closure:
            new.add(_join(lab, c))
        closure |= new
    return closure


def _patch_labels(qc: QuotientComplex) -> list[tuple[int, ...]]:
    """Labels of the closed stars of the representative vertices."""
    cx = qc.window
    reps = {v.key for v in qc.cells[0]}
    keep = set()
    for c in cx.cells.values():
        if reps & set(c.vertices):
            keep.add(c.key)
            keep.update(_faces(cx, c.key))
    return [cx.cells[k].label for k in keep if _orbit_key(qc, k) not in qc.removed]


def _faces(cx, key):
    out = set()
    stack = [key]
    while stack:
        k = stack.pop()
        for f, _ in cx.cells[k].facets:
            if f not in out:
                out.add(f)
                stack.append(f)
    return out


def _orbit_key(qc: QuotientComplex, key):
    c = qc.window.cells[key]
    w = qc.translations.reduce(c.centroid)
    return qc.spec.translate_key(key, tuple(-x for x in w))


def _region_radius(spec: ArrangementSpec, b: Sequence[int]) -> Fraction:
    """Sup-norm bound on t over {-b_y <= B t + eps < b_x + 1}."""
    n = spec.n
    bx, by = b[:n], b[n:]
    lo = [-by[i] - spec.epsilon[i] for i in range(n)]
    hi = [bx[i] + 1 - spec.epsilon[i] for i in range(n)]
    best = None
    for rows in itertools.combinations(spec.families, spec.m):
        sub = [spec.basis.row(i) for i in rows]
        if det(sub) == 0:
            continue
        inv = inverse(sub)
        bound = max(
            sum(abs(x) * max(abs(lo[i]), abs(hi[i])) for x, i in zip(r, rows)) for r in inv
        )
        best = bound if best is None else min(best, bound)
    return best


def reduced_homology(cells_by_dim: list[list], facets_of) -> list[int]:
    """Reduced rational Betti numbers of a finite cell complex (empty complex: all zero)."""
    sizes = [len(c) for c in cells_by_dim]
    if sizes[0] == 0:
        return [0] * len(sizes)
    ranks = [1]  # augmentation
    for k in range(1, len(cells_by_dim)):
        idx = {key: i for i, key in enumerate(cells_by_dim[k - 1])}
        rows = []
        for key in cells_by_dim[k]:
            rows.append({idx[f]: s for f, s in facets_of(key) if f in idx})
        ranks.append(sparse_rank(rows))
    ranks.append(0)
    return [sizes[k] - ranks[k] - ranks[k + 1] for k in range(len(sizes))]


@dataclass
class ExactnessReport:
    degrees_checked: int
    window_radius: int
    failures: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "exact": self.exact,
            "degrees_checked": self.degrees_checked,
            "window_radius": self.window_radius,
            "failures": self.failures,
        }


def exactness_certificate(cc: ChainComplex | None, qc: QuotientComplex, degrees=None) -> ExactnessReport:
    """Restricted-subcomplex acyclicity over the candidate degrees.

    For each degree b the cells of the periodic complex with label <= b form a
    finite subcomplex; the resolution is exact in degree b iff that subcomplex
    is empty or has vanishing reduced homology. Candidate degrees default to
    the join-closure of the labels around the representative vertices, taken
    up to translation. The window is enlarged when a degree needs it.
    """
    spec = qc.spec
    if cc is not None and tuple(cc.ranks) != qc.f_vector():
        raise InputError("chain complex does not come from this quotient complex")
    if degrees is None:
        cand = _join_closure(_patch_labels(qc))
    else:
        cand = {tuple(int(x) for x in b) for b in degrees}
        if any(len(b) != 2 * spec.n for b in cand):
            raise InputError(f"degrees must have length {2 * spec.n}")
    lat = qc.translations
    shifts = IntegerMatrix.from_columns([spec.lift(v) for v in lat.basis.columns()], 2 * spec.n)
    cls = cokernel(shifts)
    by_class = {}
    for b in sorted(cand):
        by_class.setdefault(cls(b), b)
    todo = sorted(by_class.values())

    need = max((_region_radius(spec, b) for b in todo), default=Fraction(0))
    cx = qc.window
    if need > cx.radius:
        cx = build_arrangement(spec, radius=int(floor(need)) + 1)

    # bucket cells by the integer part of their centroid
    buckets = defaultdict(list)
    orbit = {}
    for c in cx.cells.values():
        buckets[tuple(floor(x) for x in c.centroid)].append(c)
        w = lat.reduce(c.centroid)
        orbit[c.key] = spec.translate_key(c.key, tuple(-x for x in w))

    report = ExactnessReport(len(todo), cx.radius)
    for b in todo:
        r = _region_radius(spec, b)
        lo, hi = floor(-r) - 1, floor(r) + 1
        chosen = []
        for idx in itertools.product(range(lo, hi + 1), repeat=spec.m):
            for c in buckets.get(idx, ()):
                if orbit[c.key] in qc.removed:
                    continue
                if all(x <= y for x, y in zip(c.label, b)):
                    chosen.append(c)
        by_dim = [[] for _ in range(spec.m + 1)]
        for c in sorted(chosen, key=lambda c: c.key):
            by_dim[c.dim].append(c.key)
        betti = reduced_homology(by_dim, lambda k: cx.cells[k].facets)
        if any(betti):
            report.failures.append({"degree": list(b), "reduced_betti": betti})
    return report


# -- gradings ------------------------------------------------------------------------------------


def grading_map(qc: QuotientComplex) -> Cokernel:
    """Z^n modulo the ambient translation lattice: Cl(X), or Z^n / L̃ for a cover."""
    spec = qc.spec
    cols = [spec.basis @ v for v in qc.translations.basis.columns()]
    return cokernel(IntegerMatrix.from_columns(cols, spec.n))


def graded_twists(cc: ChainComplex, pi: Cokernel) -> ChainComplex:
    """Attach (π(u_x), π(u_y)) to every summand and check each entry has degree 0."""
    n = cc.nvars

    def twist(e):
        return pi(e[:n]), pi(e[n:])

    twists = tuple(tuple(twist(lab) for lab in deg) for deg in cc.labels)
    for k, d in enumerate(cc.differentials, start=1):
        for t in d.terms:
            src = twists[k][t.j]
            tgt = twists[k - 1][t.i]
            ex, ey = twist(t.exp)
            if pi.add(tgt[0], ex) != src[0] or pi.add(tgt[1], ey) != src[1]:
                raise VerificationError(f"entry ({t.i}, {t.j}) of differential {k} is not homogeneous of degree 0")
    return replace(cc, twists=twists)


# -- presentation ----------------------------------------------------------------------------------


def monomial_string(exp: Sequence[int], n: int) -> str:
    parts_num, parts_den = [], []
    names = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
    for name, e in zip(names, exp):
        if e > 0:
            parts_num.append(name if e == 1 else f"{name}^{e}")
        elif e < 0:
            parts_den.append(name if e == -1 else f"{name}^{-e}")
    num = "*".join(parts_num) or "1"
    if not parts_den:
        return num
    den = parts_den[0] if len(parts_den) == 1 else "(" + "*".join(parts_den) + ")"
    return f"{num}/{den}"


def polynomial_string(poly: dict, n: int) -> str:
    if not poly:
        return "0"
    out = []
    for e, c in sorted(poly.items()):
        mono = monomial_string(e, n)
        if mono == "1":
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        out.append(("-" if c < 0 else "+") + body)
    s = "".join(out)
    return s[1:] if s.startswith("+") else s


def dense(cc: ChainComplex, degree: int) -> list[list[dict]]:
    """Differential ``degree`` as a dense matrix of polynomials."""
    d = cc.differentials[degree - 1]
    M = [[{} for _ in range(d.cols)] for _ in range(d.rows)]
    for t in d.terms:
        poly = M[t.i][t.j]
        poly[t.exp] = poly.get(t.exp, 0) + t.sign
        if poly[t.exp] == 0:
            del poly[t.exp]
    return M


def source_description(spec: ArrangementSpec, translations: TranslationLattice) -> dict:
    return {
        "basis": spec.basis.to_json(),
        "epsilon": [format_rational(e) for e in spec.epsilon],
        "translations": translations.basis.to_json(),
        "window": spec.window_radius,
    }
