"""Command-line entry point. Every command prints one JSON document.

Exit status: 0 success, 2 failed verification, 3 bad input, 4 a search or
window bound was exceeded. Errors are reported as {"error": {"code", "message"}}.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arrangement import (
    ArrangementSpec,
    TranslationLattice,
    build_arrangement,
    build_quotient,
    check_transversality,
    parse_rational,
    quotient_complex,
)
from .cech import ext_dims, exceptional_collection_check, h_dims, koszul_degree_data, koszul_sequence_check
from .diagonal import (
    DEFAULT_KMAX,
    cokernel_extra_monomials,
    floor_shift_check,
    in_lattice_module,
    torsion_certificate,
)
from .errors import InputError, SearchBoundExceeded, ToricDiagError, VerificationError
from .fan import Fan, fan_report, irrelevant_ideal, load_corpus
from .lattice import Lattice
from .linalg import IntegerMatrix
from .morita import morita_report
from .render import render_svg
from .resolution import (
    ChainComplex,
    cellular_differential,
    exactness_certificate,
    grading_map,
    graded_twists,
    monomial_string,
    source_description,
    verify_d_squared,
)


def dumps(obj) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- option parsing -----------------------------------------------------------------------------


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def parse_rational_list(text: str) -> list[Fraction]:
    return [parse_rational(x.strip()) for x in text.split(",") if x.strip()]


def load_input(source: str) -> dict:
    """A JSON file path, or the name of a bundled corpus entry."""
    path = Path(source)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            # examples/p2.json style references fall back to the corpus by stem
            try:
                return load_corpus(path.stem)
            except InputError:
                raise InputError(f"no such file: {source}") from None
        try:
            with open(path) as fh:
                return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{source}: invalid JSON ({exc})") from None
    return load_corpus(source)


@dataclass
class Job:
    """A fan together with the arrangement options that apply to it."""

    fan: Fan
    spec: ArrangementSpec
    group: tuple[int, ...]
    translations: TranslationLattice

    @property
    def ambient_lattice(self) -> Lattice:
        """The lattice of translations in Z^n: Im B for the variety, B·Λ̃ for the stack."""
        B = self.spec.basis
        return Lattice(IntegerMatrix.from_columns([B @ c for c in self.translations.basis.columns()], B.rows))


def make_job(args) -> Job:
    data = load_input(args.input)
    fan = Fan.from_dict(data)
    if args.epsilon is not None:
        eps = parse_rational_list(args.epsilon)
    else:
        eps = [parse_rational(e) for e in data.get("epsilon", [])]
    group = tuple(parse_int_list(args.group)) if args.group is not None else tuple(data.get("group", ()))
    if any(d < 1 for d in group):
        raise InputError(f"group orders must be positive: {list(group)}")
    if len(group) > fan.dim:
        raise InputError(f"{len(group)} cyclic factors but the lattice has rank {fan.dim}")
    window = args.window if args.window is not None else data.get("window")
    spec = ArrangementSpec(fan.ray_matrix, tuple(eps), window)
    diag = list(group) + [1] * (fan.dim - len(group))
    C = IntegerMatrix.from_rows([[diag[i] if i == j else 0 for j in range(fan.dim)] for i in range(fan.dim)], fan.dim)
    return Job(fan, spec, group, TranslationLattice(C))


def build_job_quotient(job: Job):
    """An explicit window is used as given; otherwise it grows to fit the translations."""
    if job.spec.window_radius is None:
        return build_quotient(job.spec, job.translations)
    cx = build_arrangement(job.spec, job.spec.window_radius)
    return quotient_complex(cx, job.translations)


def _gate(qc) -> dict:
    """Which of the two admissibility conditions holds for the arrangement."""
    from .arrangement import vertices_equal_lattice

    transversal, witnesses = check_transversality(qc.window)
    lattice_vertices = vertices_equal_lattice(qc.window) if not any(qc.spec.epsilon) else None
    return {
        "transversal": transversal,
        "transversality_witnesses": len(witnesses),
        "vertices_equal_lattice": lattice_vertices,
        "admissible": bool(transversal or lattice_vertices),
    }


# -- commands -------------------------------------------------------------------------------------


class Outcome:
    def __init__(self, payload, status: int = 0, text: str | None = None):
        self.payload = payload
        self.status = status
        self.text = text


def cmd_fan(args) -> Outcome:
    if args.action != "check":
        raise InputError(f"unknown fan action {args.action!r}")
    return Outcome(fan_report(Fan.from_dict(load_input(args.input))))


def cmd_arrangement(args) -> Outcome:
    if args.action != "build":
        raise InputError(f"unknown arrangement action {args.action!r}")
    job = make_job(args)
    qc = build_job_quotient(job)
    out = qc.to_json()
    out["checks"] = _gate(qc)
    out["window"] = qc.window.radius
    return Outcome(out)


def _resolve(job: Job):
    qc = build_job_quotient(job)
    cc = cellular_differential(qc)
    cc = graded_twists(cc, grading_map(qc))
    src = source_description(job.spec, job.translations)
    src["window"] = qc.window.radius
    return qc, ChainComplex(cc.nvars, cc.ranks, cc.differentials, cc.labels, cc.twists, src)


def cmd_resolve(args) -> Outcome:
    job = make_job(args)
    qc, cc = _resolve(job)
    gate = _gate(qc)
    out = cc.to_json()
    out["checks"] = gate
    out["d_squared"] = verify_d_squared(cc)
    status = 0 if gate["admissible"] and out["d_squared"] else 2
    return Outcome(out, status)


def _qc_from_source(cc: ChainComplex):
    src = cc.source
    if not src:
        raise InputError("complex carries no source description; regenerate it with `resolve`")
    spec = ArrangementSpec(IntegerMatrix.from_json(src["basis"]), tuple(parse_rational(e) for e in src["epsilon"]),
                           src.get("window"))
    lat = TranslationLattice(IntegerMatrix.from_json(src["translations"]))
    qc = quotient_complex(build_arrangement(spec, spec.window_radius), lat)
    return qc


def cmd_verify(args) -> Outcome:
    if args.what == "properties":
        return _verify_properties(args)
    data = load_input(args.input)
    cc = ChainComplex.from_json(data)
    if args.what == "d2":
        ok = verify_d_squared(cc)
        return Outcome({"check": "d2", "ok": ok}, 0 if ok else 2)
    if args.what == "exactness":
        qc = _qc_from_source(cc)
        rebuilt = cellular_differential(qc)
        if rebuilt.differentials != cc.differentials or rebuilt.labels != cc.labels:
            raise VerificationError("complex does not match the arrangement it claims to come from")
        report = exactness_certificate(cc, qc)
        out = {"check": "exactness", "ok": report.exact, **report.to_json()}
        return Outcome(out, 0 if report.exact else 2)
    raise InputError(f"unknown verification {args.what!r}")


def _verify_properties(args) -> Outcome:
    """Seeded randomized spot checks of the label and membership rules on a fan."""
    rng = random.Random(args.seed)
    fan = Fan.from_dict(load_input(args.input))
    L = Lattice(fan.ray_matrix)
    n = fan.nrays
    trials = args.trials
    floor_fail = 0
    for _ in range(trials):
        p = [Fraction(rng.randint(-500, 500), rng.randint(1, 50)) for _ in range(n)]
        m = [rng.randint(-4, 4) for _ in range(fan.dim)]
        if not floor_shift_check(p, fan.ray_matrix @ m):
            floor_fail += 1
    member_fail = 0
    for _ in range(trials):
        w = [rng.randint(-3, 3) for _ in range(2 * n)]
        brute = any(
            all(a >= b for a, b in zip(w, L.point(c) + tuple(-x for x in L.point(c))))
            for c in _box(fan.dim, 6)
        )
        if brute != in_lattice_module(w, L):
            member_fail += 1
    ok = not floor_fail and not member_fail
    return Outcome({"check": "properties", "seed": args.seed, "trials": trials,
                    "floor_shift_failures": floor_fail, "membership_failures": member_fail, "ok": ok},
                   0 if ok else 2)


def _box(d, r):
    import itertools

    return itertools.product(range(-r, r + 1), repeat=d)


def cmd_cokernel(args) -> Outcome:
    job = make_job(args)
    qc = build_job_quotient(job)
    L = job.ambient_lattice
    ideal = irrelevant_ideal(job.fan, product=True)
    n = job.spec.n
    extras = cokernel_extra_monomials(qc, L)
    certs = [torsion_certificate(m, ideal, L, args.kmax) for m in extras]
    failures = [
        {"monomial": monomial_string(c.monomial, n), "generators": [ideal.format_generator(g) for g in c.failures]}
        for c in certs if not c.ok
    ]
    out = {
        "extra_monomials": [monomial_string(m, n) for m in extras],
        "certificates": [
            {**c.to_json(), "name": monomial_string(c.monomial, n),
             "generator_names": [ideal.format_generator(g) for g, _, _ in c.entries]}
            for c in certs
        ],
        "failures": failures,
        "irrelevant_ideal": str(ideal),
    }
    if failures:
        err = SearchBoundExceeded(f"{len(failures)} monomial(s) not certified within k_max = {args.kmax}")
        out["error"] = {"code": err.code, "message": str(err)}
        return Outcome(out, err.exit_status)
    return Outcome(out)


def _weights(text: str) -> tuple[int, int]:
    if "," in text or text.lstrip("-").isdigit():
        w = parse_int_list(text)
    else:
        w = load_input(text).get("weights")
        if w is None:
            raise InputError(f"{text} has no weights entry")
    if len(w) != 2:
        raise InputError(f"need two weights, got {w}")
    return int(w[0]), int(w[1])


def cmd_cech(args) -> Outcome:
    if args.weights is None:
        raise InputError("--weights is required")
    a, b = _weights(args.weights)
    if args.mode == "exceptional":
        if args.twists is None:
            raise InputError("--twists is required")
        rep = exceptional_collection_check(a, b, parse_int_list(args.twists))
        out = {"weights": [a, b], "twists": parse_int_list(args.twists), **rep.to_json()}
        return Outcome(out, 0 if rep.ok else 2)
    if args.mode == "koszul":
        N = args.degree if args.degree is not None else 8
        ok = koszul_sequence_check(a, b, N)
        return Outcome({"weights": [a, b], "degree": N, "exact": ok,
                        "degrees": koszul_degree_data(a, b, N)}, 0 if ok else 2)
    if args.mode == "ext":
        if args.source_twist is None or args.twist is None:
            raise InputError("ext needs --from and --twist")
        dims = ext_dims(a, b, args.source_twist, args.twist)
        return Outcome({"weights": [a, b], "from": args.source_twist, "to": args.twist,
                        "ext": [{"degree": k, "dim": d} for k, d in dims]})
    if args.twist is None:
        raise InputError("--twist is required")
    h0, h1 = h_dims(a, b, args.twist)
    return Outcome({"h0": h0, "h1": h1})


def cmd_morita(args) -> Outcome:
    if args.n is None or args.group is None or args.weights is None:
        raise InputError("morita-check needs --n, --group and --weights")
    factors = parse_int_list(args.group)
    raw = [parse_int_list(w) for w in args.weights.split(";")] if ";" in args.weights else parse_int_list(args.weights)
    N = args.degree if args.degree is not None else 6
    rep = morita_report(args.n, factors, raw, N)
    ok = rep["bijection"] and rep["action_compat"] and rep["graded_dims_agree"] and rep["antidiagonal"]
    return Outcome(rep, 0 if ok else 2)


def cmd_render(args) -> Outcome:
    job = make_job(args)
    qc = build_job_quotient(job)
    svg = render_svg(qc)
    return Outcome(None, 0, text=svg)


# -- argument parser -------------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="write the result here instead of standard output")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--window", type=int, help="window radius for the arrangement")
    p.add_argument("--kmax", type=int, default=DEFAULT_KMAX, help="largest power tried in torsion certificates")
    return p


def _arrangement_opts(p):
    p.add_argument("input", help="fan JSON file or bundled corpus name")
    p.add_argument("--epsilon", help="comma-separated rationals such as 1/100,0,0,1/100")
    p.add_argument("--group", help="cyclic orders d1,d2,...; generator i of L maps to e_i")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="toricdiag", parents=[common],
                                     description="Cellular resolutions of toric diagonals.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fan", parents=[common], help="fan reports")
    p.add_argument("action", choices=["check"])
    p.add_argument("input")
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("arrangement", parents=[common], help="build the quotient cell complex")
    p.add_argument("action", choices=["build"])
    _arrangement_opts(p)
    p.set_defaults(func=cmd_arrangement)

    p = sub.add_parser("resolve", parents=[common], help="cellular resolution of the diagonal")
    _arrangement_opts(p)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("verify", parents=[common], help="check a stored complex, or run property checks on a fan")
    p.add_argument("what", choices=["d2", "exactness", "properties"])
    p.add_argument("input")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cokernel", parents=[common], help="extra monomials and torsion certificates")
    _arrangement_opts(p)
    p.set_defaults(func=cmd_cokernel)

    p = sub.add_parser("cech", parents=[common], help="line bundle cohomology on P(a,b)")
    p.add_argument("mode", nargs="?", default="h", choices=["h", "exceptional", "koszul", "ext"])
    p.add_argument("--weights", help="a,b or a corpus entry with weights")
    p.add_argument("--twist", type=int)
    p.add_argument("--from", dest="source_twist", type=int)
    p.add_argument("--twists")
    p.add_argument("--degree", type=int)
    p.set_defaults(func=cmd_cech)

    p = sub.add_parser("morita-check", parents=[common], help="truncated Morita comparison for A^n/G")
    p.add_argument("--n", type=int)
    p.add_argument("--group", help="cyclic orders d1,d2,...")
    p.add_argument("--weights", help="one weight per coordinate; use ';' between tuples for several factors")
    p.add_argument("--degree", type=int)
    p.set_defaults(func=cmd_morita)

    p = sub.add_parser("render", parents=[common], help="SVG drawing of a rank 1 or 2 quotient")
    _arrangement_opts(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which would read as a failed verification
        return 0 if exc.code == 0 else InputError.exit_status
    try:
        outcome = args.func(args)
    except ToricDiagError as exc:
        sys.stdout.write(dumps({"error": {"code": exc.code, "message": str(exc)}}))
        return exc.exit_status
    except (OSError, json.JSONDecodeError) as exc:
        sys.stdout.write(dumps({"error": {"code": InputError.code, "message": str(exc)}}))
        return InputError.exit_status
    text = outcome.text if outcome.text is not None else dumps(outcome.payload)
    if args.out:
        Path(args.out).write_text(text)
        if outcome.payload is not None and outcome.status:
            sys.stdout.write(dumps({"written": args.out, "status": outcome.status}))
    else:
        sys.stdout.write(text)
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
