"""The periodic hyperplane arrangement cut out on RL and its quotient complexes.

Points of RL are written in lattice coordinates t, so the ambient point is
``p = B t + eps``. Family i consists of the hyperplanes ``p_i = j`` for
integers j, that is ``b_i . t = j - eps_i``. A cell is pinned down by its
*doubled floor* vector s: ``s_i = 2j`` when the cell lies on ``p_i = j`` and
``s_i = 2j + 1`` when it lies strictly between j and j + 1. Translating by
an integer vector v maps s to ``s + 2 B v``.

Enumeration is exact: vertices are intersections of m families solved over
the rationals, and the cells around a vertex are the feasible sign patterns
of the families through it.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Sequence

from . import exactlp
from .errors import InputError, WindowTooSmallError
from .lattice import Lattice
from .linalg import IntegerMatrix, as_matrix, det, det_rational, inverse, nullspace, rank, solve

MAX_RANK = 3


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse rational {text!r}") from None


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _doubled_floor(x: Fraction) -> int:
    f = floor(x)
    return 2 * f if x == f else 2 * f + 1


@dataclass(frozen=True)
class ArrangementSpec:
    basis: IntegerMatrix  # B, n x m
    epsilon: tuple[Fraction, ...]
    window_radius: int | None = None

    def __post_init__(self):
        B = as_matrix(self.basis)
        object.__setattr__(self, "basis", B)
        eps = tuple(parse_rational(e) for e in self.epsilon) if self.epsilon else (Fraction(0),) * B.rows
        object.__setattr__(self, "epsilon", eps)
        n, m = B.shape
        if len(eps) != n:
            raise InputError(f"epsilon has {len(eps)} entries, expected {n}")
        if any(not (0 <= e < 1) for e in eps):
            raise InputError("epsilon entries must lie in [0, 1)")
        if m == 0 or rank(B.entries, m) != m:
            raise InputError("lattice basis columns must be independent and nonempty")
        if m > MAX_RANK:
            raise InputError(f"face enumeration is implemented for rank <= {MAX_RANK}, got {m}")
        for i, row in enumerate(B.entries):
            if not any(row) and eps[i] != 0:
                raise InputError(f"family {i} has zero normal but epsilon {eps[i]}: it meets RL nowhere")
        if self.window_radius is not None and self.window_radius < 1:
            raise InputError("window radius must be at least 1")

    @classmethod
    def from_lattice(cls, L: Lattice, epsilon=None, window_radius=None) -> "ArrangementSpec":
        return cls(L.basis, tuple(epsilon) if epsilon else (), window_radius)

    @property
    def n(self) -> int:
        return self.basis.rows

    @property
    def m(self) -> int:
        return self.basis.cols

    @property
    def families(self) -> tuple[int, ...]:
        return tuple(i for i, row in enumerate(self.basis.entries) if any(row))

    def default_window(self) -> int:
        top = max(abs(x) for row in self.basis.entries for x in row)
        return 2 * (top + 1)

    def ambient(self, t: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(_dot(row, t) + e for row, e in zip(self.basis.entries, self.epsilon))

    def vertex_label(self, t: Sequence[Fraction]) -> tuple[int, ...]:
        """Exponent (⌊p⌋, -⌊p⌋) of the vertex at t."""
        fl = tuple(floor(x) for x in self.ambient(t))
        return fl + tuple(-x for x in fl)

    def lift(self, v: Sequence[int]) -> tuple[int, ...]:
        """Exponent (Bv, -Bv) of the translation by v."""
        u = self.basis @ tuple(v)
        return u + tuple(-x for x in u)

    def translate_key(self, key: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        u = self.basis @ tuple(v)
        return tuple(s + 2 * x for s, x in zip(key, u))

    def cell_diameter(self) -> Fraction:
        """Bound on the sup-norm diameter of any cell, from the best invertible m-subset."""
        best = None
        for rows in itertools.combinations(self.families, self.m):
            sub = [self.basis.row(i) for i in rows]
            if det(sub) == 0:
                continue
            inv = inverse(sub)
            d = max(sum(abs(x) for x in r) for r in inv)
            best = d if best is None else min(best, d)
        return best


@dataclass
class Cell:
    key: tuple[int, ...]
    dim: int
    vertices: tuple[tuple[int, ...], ...]  # keys of vertex cells
    centroid: tuple[Fraction, ...]
    label: tuple[int, ...]
    tangent: tuple[tuple[Fraction, ...], ...]
    facets: list[tuple[tuple[int, ...], int]] = field(default_factory=list)

    def on_families(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.key) if s % 2 == 0)


class CellComplex:
    """A finite window of the periodic arrangement, closed under taking faces.

    Holds at least every cell whose closure meets ``[-radius, radius]^m``.
    Every stored cell has its complete vertex set.
    """

    def __init__(self, spec: ArrangementSpec, radius: int, cells: dict, vertex_points: dict, stars: dict):
        self.spec = spec
        self.radius = radius
        self.cells: dict[tuple[int, ...], Cell] = cells
        self.vertex_points = vertex_points
        self.stars = stars

    def __contains__(self, key) -> bool:
        return key in self.cells

    def of_dim(self, k: int) -> list[Cell]:
        return sorted((c for c in self.cells.values() if c.dim == k), key=lambda c: c.key)

    def f_vector(self) -> tuple[int, ...]:
        counts = [0] * (self.spec.m + 1)
        for c in self.cells.values():
            counts[c.dim] += 1
        return tuple(counts)

    def vertices(self) -> list[Cell]:
        return self.of_dim(0)


# -- enumeration ------------------------------------------------------------------


class _LocalCells:
    """Feasible sign patterns around a vertex, cached by the normals involved."""

    def __init__(self, m: int):
        self.m = m
        self.cache: dict[tuple, list[tuple[int, ...]]] = {}

    def patterns(self, normals: tuple[tuple[int, ...], ...]) -> list[tuple[int, ...]]:
        if normals in self.cache:
            return self.cache[normals]
        out = []

        def extend(prefix):
            if len(prefix) == len(normals):
                out.append(tuple(prefix))
                return
            for s in (0, 1, -1):
                cand = prefix + [s]
                if exactlp.sign_feasible(normals[: len(cand)], cand, self.m) is not None:
                    extend(cand)

        extend([])
        self.cache[normals] = out
        return out


def _enumerate_vertices(spec: ArrangementSpec, radius: Fraction) -> dict:
    """All vertices t with |t|_inf <= radius, keyed by their doubled-floor vector."""
    B, eps, m = spec.basis, spec.epsilon, spec.m
    points = {}
    for rows in itertools.combinations(spec.families, m):
        sub = [B.row(i) for i in rows]
        if det(sub) == 0:
            continue
        inv = inverse(sub)
        ranges = []
        for i in rows:
            reach = sum(abs(x) for x in B.row(i)) * radius
            ranges.append(range(ceil(-reach + eps[i]), floor(reach + eps[i]) + 1))
        for js in itertools.product(*ranges):
            rhs = [j - eps[i] for j, i in zip(js, rows)]
            t = tuple(_dot(r, rhs) for r in inv)
            if all(abs(x) <= radius for x in t):
                key = tuple(_doubled_floor(x) for x in spec.ambient(t))
                points.setdefault(key, t)
    return points


def _tangent_basis(spec: ArrangementSpec, key: Sequence[int]) -> tuple[tuple[Fraction, ...], ...]:
    normals = [spec.basis.row(i) for i in spec.families if key[i] % 2 == 0]
    return tuple(tuple(v) for v in nullspace(normals, spec.m))


def _incidence_sign(cell: Cell, facet: Cell) -> int:
    """Induced orientation: outward direction followed by the facet's frame."""
    out = [a - b for a, b in zip(facet.centroid, cell.centroid)]
    frame = [list(col) for col in zip(*cell.tangent)]  # m x k, columns = tangent vectors
    coords = []
    for vec in [out] + [list(v) for v in facet.tangent]:
        x = solve(frame, vec)
        if x is None:
            raise AssertionError("facet direction outside the cell's span")
        coords.append(x)
    d = det_rational(coords)
    if d == 0:
        raise AssertionError("degenerate orientation frame")
    return 1 if d > 0 else -1


def _local_keys(spec: ArrangementSpec, vkey, local: _LocalCells):
    """(cell key, dimension) for every cell whose closure contains the vertex vkey."""
    through = [i for i in spec.families if vkey[i] % 2 == 0]
    normals = tuple(spec.basis.row(i) for i in through)
    out = []
    for pattern in local.patterns(normals):
        key = list(vkey)
        for i, s in zip(through, pattern):
            key[i] += s
        on = [spec.basis.row(i) for i, s in zip(through, pattern) if s == 0]
        out.append((tuple(key), spec.m - (rank(on, spec.m) if on else 0)))
    return out


def build_arrangement(spec: ArrangementSpec, radius: int | None = None) -> CellComplex:
    """Windowed complex holding every cell whose closure meets [-radius, radius]^m."""
    radius = radius if radius is not None else (spec.window_radius or spec.default_window())
    D = spec.cell_diameter()
    mid = radius + D
    outer = radius + 2 * D
    points = _enumerate_vertices(spec, outer)
    local = _LocalCells(spec.m)

    cell_vertices: dict[tuple, set] = defaultdict(set)
    cell_dim: dict[tuple, int] = {}
    stars: dict[tuple, list] = {}
    for vkey, t in points.items():
        star = _local_keys(spec, vkey, local)
        stars[vkey] = [k for k, _ in star]
        for key, dim in star:
            cell_vertices[key].add(vkey)
            cell_dim[key] = dim

    def near(vkey):
        return all(abs(x) <= mid for x in points[vkey])

    chosen = {key for key, vs in cell_vertices.items() if any(near(v) for v in vs)}
    # closure under faces: any cell through a vertex of a chosen cell whose vertices are a subset
    closed = set(chosen)
    for key in chosen:
        vs = cell_vertices[key]
        for v in vs:
            for k2 in stars[v]:
                if k2 not in closed and cell_vertices[k2] <= vs and _is_face(k2, key):
                    closed.add(k2)

    cells = {}
    for key in closed:
        vs = sorted(cell_vertices[key])
        cen = tuple(sum(points[v][i] for v in vs) / len(vs) for i in range(spec.m))
        lab = None
        for v in vs:
            vl = spec.vertex_label(points[v])
            lab = vl if lab is None else tuple(max(a, b) for a, b in zip(lab, vl))
        cells[key] = Cell(key, cell_dim[key], tuple(vs), cen, lab, _tangent_basis(spec, key))

    # facets with incidence signs
    for key, cell in cells.items():
        if cell.dim == 0:
            continue
        vs = set(cell.vertices)
        seen = set()
        for v in cell.vertices:
            for k2 in stars[v]:
                if k2 in seen or k2 == key:
                    continue
                seen.add(k2)
                if cell_dim[k2] != cell.dim - 1 or not cell_vertices[k2] <= vs or not _is_face(k2, key):
                    continue
                facet = cells[k2]
                cell.facets.append((k2, _incidence_sign(cell, facet)))
        cell.facets.sort()
    return CellComplex(spec, radius, cells, points, stars)


def _is_face(small: Sequence[int], big: Sequence[int]) -> bool:
    for a, b in zip(small, big):
        if b % 2 == 0:
            if a != b:
                return False
        elif abs(a - b) > 1:
            return False
    return True


# -- checks -----------------------------------------------------------------------------


def check_transversality(cx: CellComplex) -> tuple[bool, list[dict]]:
    """Every vertex lies on exactly m families, with independent normals."""
    spec = cx.spec
    bad = []
    for v in cx.vertices():
        on = v.on_families()
        normals = [spec.basis.row(i) for i in on if i in spec.families]
        if len(normals) != spec.m or rank(normals, spec.m) != spec.m:
            bad.append({
                "vertex": [format_rational(x) for x in v.centroid],
                "families": list(on),
            })
    return not bad, bad


def vertices_equal_lattice(cx: CellComplex) -> bool:
    """At eps = 0: every vertex of the window is an integer point of Z^m."""
    if any(cx.spec.epsilon):
        raise InputError("vertices_equal_lattice is defined for epsilon = 0")
    return all(x.denominator == 1 for v in cx.vertices() for x in v.centroid)


# -- translation lattices and quotients ------------------------------------------------------


@dataclass(frozen=True)
class TranslationLattice:
    """Full-rank sublattice of Z^m with the centred fundamental domain C·[-1/2, 1/2)^m."""

    basis: IntegerMatrix  # m x m, columns

    def __post_init__(self):
        b = as_matrix(self.basis)
        object.__setattr__(self, "basis", b)
        if b.rows != b.cols or det(b.entries) == 0:
            raise InputError("translation lattice must have full rank")

    @classmethod
    def standard(cls, m: int) -> "TranslationLattice":
        return cls(IntegerMatrix.identity(m))

    @property
    def index(self) -> int:
        return abs(det(self.basis.entries))

    @property
    def radius(self) -> Fraction:
        return Fraction(max(sum(abs(x) for x in row) for row in self.basis.entries), 2)

    def reduce(self, point: Sequence[Fraction]) -> tuple[int, ...]:
        """The lattice vector w with point - w in the centred fundamental domain."""
        inv = inverse(self.basis.entries)
        y = [_dot(row, point) for row in inv]
        k = [floor(x + Fraction(1, 2)) for x in y]
        return self.basis @ k

    def contains(self, v: Sequence[int]) -> bool:
        x = solve(self.basis.entries, list(v))
        return x is not None and all(c.denominator == 1 for c in x)


@dataclass(frozen=True)
class QCell:
    index: int
    dim: int
    key: tuple[int, ...]
    centroid: tuple[Fraction, ...]
    label: tuple[int, ...]


@dataclass(frozen=True)
class Incidence:
    dim: int  # dimension of the larger cell
    cell: int
    facet: int
    sign: int
    shift: tuple[int, ...]  # actual facet = canonical facet + shift


class QuotientComplex:
    """Orbit representatives of a windowed complex modulo a translation lattice."""

    def __init__(self, window: CellComplex, translations: TranslationLattice,
                 cells: list[list[QCell]], incidence: list[Incidence], removed=frozenset()):
        self.window = window
        self.translations = translations
        self.cells = cells
        self.incidence = incidence
        self.removed = frozenset(removed)
        self._by_key = {c.key: c for dim_cells in cells for c in dim_cells}

    @property
    def spec(self) -> ArrangementSpec:
        return self.window.spec

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * f for k, f in enumerate(self.f_vector()))

    def cell(self, key) -> QCell:
        return self._by_key[key]

    def orbit_of(self, key: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(canonical key, shift) with key = canonical translated by shift."""
        c = self.window.cells[tuple(key)]
        w = self.translations.reduce(c.centroid)
        neg = tuple(-x for x in w)
        return self.spec.translate_key(key, neg), w

    def labels(self) -> dict:
        return {c.key: c.label for dim_cells in self.cells for c in dim_cells}

    def boundary(self, dim: int, index: int) -> list[Incidence]:
        return [inc for inc in self.incidence if inc.dim == dim and inc.cell == index]

    def entry_exponent(self, inc: Incidence) -> tuple[int, ...]:
        big = self.cells[inc.dim][inc.cell].label
        small = self.cells[inc.dim - 1][inc.facet].label
        lift = self.spec.lift(inc.shift)
        return tuple(a - b - c for a, b, c in zip(big, small, lift))

    def without(self, keys: Iterable[Sequence[int]]) -> "QuotientComplex":
        """Delete the given orbits together with every orbit having one of them as a face."""
        gone = {tuple(k) for k in keys}
        for k in gone:
            if k not in self._by_key:
                raise InputError(f"no orbit with key {k}")
        changed = True
        while changed:
            changed = False
            for inc in self.incidence:
                big = self.cells[inc.dim][inc.cell].key
                small = self.cells[inc.dim - 1][inc.facet].key
                if small in gone and big not in gone:
                    gone.add(big)
                    changed = True
        return _assemble(self.window, self.translations, removed=self.removed | gone)

    def to_json(self) -> dict:
        spec = self.spec
        return {
            "basis": spec.basis.to_json(),
            "epsilon": [format_rational(e) for e in spec.epsilon],
            "translations": self.translations.basis.to_json(),
            "f_vector": list(self.f_vector()),
            "cells": [
                {
                    "id": f"{c.dim}:{c.index}",
                    "dim": c.dim,
                    "offsets": _describe_offsets(c.key),
                    "point": [format_rational(x) for x in c.centroid],
                    "label": list(c.label),
                }
                for dim_cells in self.cells for c in dim_cells
            ],
            "incidence": [
                [f"{i.dim}:{i.cell}", f"{i.dim - 1}:{i.facet}", i.sign, list(i.shift)]
                for i in self.incidence
            ],
        }


def _describe_offsets(key):
    out = []
    for s in key:
        if s % 2 == 0:
            out.append({"on": s // 2})
        else:
            out.append({"between": [(s - 1) // 2, (s + 1) // 2]})
    return out


def _assemble(cx: CellComplex, lat: TranslationLattice, removed=frozenset()) -> QuotientComplex:
    spec = cx.spec
    reps = []
    for cell in cx.cells.values():
        if cell.key in removed:
            continue
        w = lat.reduce(cell.centroid)
        if not any(w):
            reps.append(cell)
    reps.sort(key=lambda c: (c.dim, c.key))
    by_dim: list[list[QCell]] = [[] for _ in range(spec.m + 1)]
    index = {}
    for c in reps:
        q = QCell(len(by_dim[c.dim]), c.dim, c.key, c.centroid, c.label)
        by_dim[c.dim].append(q)
        index[c.key] = q
    incidence = []
    for c in reps:
        for fkey, sign in cx.cells[c.key].facets:
            facet = cx.cells[fkey]
            w = lat.reduce(facet.centroid)
            canon = spec.translate_key(fkey, tuple(-x for x in w))
            if canon in removed:
                raise InputError(f"orbit {canon} was removed but is a face of kept orbit {c.key}")
            if canon not in index:
                raise WindowTooSmallError(
                    f"orbit of cell {fkey} has no representative in the window (expected {canon})"
                )
            incidence.append(Incidence(c.dim, index[c.key].index, index[canon].index, sign, w))
    incidence.sort(key=lambda i: (i.dim, i.cell, i.facet, i.shift))
    return QuotientComplex(cx, lat, by_dim, incidence, removed)


def quotient_complex(cx: CellComplex, translations: TranslationLattice | IntegerMatrix | None = None) -> QuotientComplex:
    """One canonical cell per orbit, with induced incidences and labels.

    The canonical representative of an orbit is the cell whose centroid lies
    in the centred fundamental domain of the translation lattice.
    """
    spec = cx.spec
    if translations is None:
        lat = TranslationLattice.standard(spec.m)
    elif isinstance(translations, TranslationLattice):
        lat = translations
    else:
        lat = TranslationLattice(translations)
    if lat.basis.rows != spec.m:
        raise InputError("translation lattice rank does not match the arrangement")
    qc = _assemble(cx, lat)
    _check_closed(qc)
    return qc


def _check_closed(qc: QuotientComplex) -> None:
    """Every cell in the star of a representative vertex must have a representative."""
    cx, spec, lat = qc.window, qc.spec, qc.translations
    local = _LocalCells(spec.m)
    for v in qc.cells[0]:
        for key, _ in _local_keys(spec, v.key, local):
            if key not in cx.cells:
                raise WindowTooSmallError(f"cell {key} around vertex {v.key} lies outside the window")
            w = lat.reduce(cx.cells[key].centroid)
            canon = spec.translate_key(key, tuple(-x for x in w))
            if canon not in qc._by_key and canon not in qc.removed:
                raise WindowTooSmallError(f"orbit of cell {key} has no representative in the window")
    if not qc.cells[0]:
        raise WindowTooSmallError("no vertex orbit found in the window")


def required_radius(spec: ArrangementSpec, lat: TranslationLattice) -> int:
    return max(1, ceil(lat.radius))


def build_quotient(spec: ArrangementSpec, translations=None) -> QuotientComplex:
    """Build a window large enough for the translation lattice and take the quotient."""
    lat = translations if isinstance(translations, TranslationLattice) else (
        TranslationLattice.standard(spec.m) if translations is None else TranslationLattice(translations))
    radius = max(spec.window_radius or spec.default_window(), required_radius(spec, lat))
    return quotient_complex(build_arrangement(spec, radius), lat)


def monomial_labels(qc: QuotientComplex) -> dict[str, tuple[int, ...]]:
    """Label exponent in Z^{2n} of each orbit representative, keyed by cell id."""
    return {f"{c.dim}:{c.index}": c.label for dim_cells in qc.cells for c in dim_cells}


# -- covering maps ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class CoveringMap:
    images: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...]  # per dim: (coarse index, shift)
    degree: int


def covering_map(fine: QuotientComplex, coarse: QuotientComplex) -> CoveringMap:
    """The projection from the cover modulo a sublattice to the coarser quotient.

    Verified to be surjective, exactly g-to-1 in each dimension, compatible
    with incidences, and to relate labels by the translation monomial.
    """
    if fine.spec != coarse.spec and (fine.spec.basis != coarse.spec.basis or fine.spec.epsilon != coarse.spec.epsilon):
        raise InputError("covering map needs complexes built from the same arrangement")
    if not all(coarse.translations.contains(v) for v in fine.translations.basis.columns()):
        raise InputError("fine translation lattice is not contained in the coarse one")
    g = fine.translations.index // coarse.translations.index
    spec = fine.spec
    images = []
    for k, dim_cells in enumerate(fine.cells):
        row = []
        counts = defaultdict(int)
        for c in dim_cells:
            w = coarse.translations.reduce(c.centroid)
            canon = spec.translate_key(c.key, tuple(-x for x in w))
            target = coarse.cell(canon)
            if tuple(a - b for a, b in zip(c.label, target.label)) != spec.lift(w):
                raise AssertionError(f"label of {c.key} is not the translate of its image")
            counts[target.index] += 1
            row.append((target.index, w))
        if sorted(counts) != list(range(len(coarse.cells[k]))) or any(v != g for v in counts.values()):
            raise AssertionError(f"covering map is not {g}-to-1 in dimension {k}")
        images.append(tuple(row))
    # incidence compatibility: the boundary of F maps onto the boundary of its image
    for k in range(1, len(fine.cells)):
        for c in fine.cells[k]:
            tgt, _ = images[k][c.index]
            mapped = sorted(
                (images[k - 1][i.facet][0], i.sign, fine.entry_exponent(i))
                for i in fine.boundary(k, c.index)
            )
            expect = sorted(
                (i.facet, i.sign, coarse.entry_exponent(i)) for i in coarse.boundary(k, tgt)
            )
            if mapped != expect:
                raise AssertionError(f"covering map does not commute with the boundary of {c.key}")
    return CoveringMap(tuple(images), g)


def epsilon_stable(L: Lattice, epsilon: Sequence[Fraction], translations=None) -> bool:
    """Halving epsilon leaves the quotient's combinatorics and labels unchanged."""
    eps = tuple(parse_rational(e) for e in epsilon)
    a = build_quotient(ArrangementSpec.from_lattice(L, eps), translations)
    b = build_quotient(ArrangementSpec.from_lattice(L, tuple(e / 2 for e in eps)), translations)

    def shape(qc):
        return (
            qc.f_vector(),
            sorted(c.label for dim_cells in qc.cells for c in dim_cells),
            sorted((i.dim, qc.cells[i.dim][i.cell].label, qc.cells[i.dim - 1][i.facet].label, i.sign)
                   for i in qc.incidence),
        )

    return shape(a) == shape(b)
