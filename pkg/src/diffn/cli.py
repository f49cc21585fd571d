"""The ``diffn`` command line.

Exit status: 0 success or a positive verdict, 1 a negative verdict, 2 bad
input, 3 an internal invariant failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dfn
from .core import DiffMorphism, DiffObject, hom_matrix, jordan_type, rank_sequence
from .derived import derived_hom_dim, is_quasi_iso, minimal_model, theta_check
from .errors import (
    DegreeMismatch,
    DimensionError,
    FieldMismatch,
    InputError,
    InvariantFailure,
    NilpotencyError,
    NotAMorphism,
    NotExact,
)
from .exactla import FieldSpec, Matrix
from .generators import GenConfig
from .homotopy import cone, coshift, hom_K, homology, homotopic, les, null_homotopy_witness, shift
from .verify import REGISTRY, run_verify

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3


def _print_matrix(label: str, m: Matrix):
    print(f"{label} {m.rows}x{m.cols}")
    for line in dfn.format_matrix(m):
        print(f"  {line}")


def _r_values(x: DiffObject, text: str) -> list[int]:
    if text == "all":
        return list(range(1, x.n))
    try:
        return [int(text)]
    except ValueError:
        raise InputError(f"--r expects an integer or 'all', got {text!r}") from None


# -- commands -------------------------------------------------------------------

def cmd_validate(args) -> int:
    lines = dfn._content_lines(dfn._read(args.file))
    kind = lines[0].split()[0] if lines else ""
    try:
        item = dfn.read_any(args.file)
    except (NilpotencyError, NotAMorphism, NotExact, DimensionError, FieldMismatch, DegreeMismatch) as exc:
        # well-formed text describing something that is not a valid object
        print(f"invalid {kind.removeprefix('dfn-')}: {exc}")
        return EXIT_FALSE
    if isinstance(item, DiffObject):
        print(f"valid object field={item.field} n={item.n} dim={item.dim}")
    elif isinstance(item, DiffMorphism):
        print(f"valid morphism field={item.field} n={item.n} {item.src.dim} -> {item.dst.dim}")
    else:
        print(f"valid ses dims {item.a.dim} -> {item.b.dim} -> {item.c.dim}")
    return EXIT_OK


def cmd_jordan(args) -> int:
    x = dfn.read_object(args.object)
    print(f"jordan {jordan_type(x)}")
    print("ranks " + " ".join(str(r) for r in rank_sequence(x)))
    return EXIT_OK


def cmd_homology(args) -> int:
    x = dfn.read_object(args.object)
    for r in _r_values(x, args.r):
        print(f"H_({r}) dim={homology(x, r).dim}")
    return EXIT_OK


def cmd_homotopic(args) -> int:
    f, g = dfn.read_morphism(args.mor_a), dfn.read_morphism(args.mor_b)
    verdict = homotopic(f, g)
    print("homotopic" if verdict else "not homotopic")
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_nullhomotopy(args) -> int:
    f = dfn.read_morphism(args.mor)
    w = null_homotopy_witness(f)
    if w is None:
        print("NONE")
        return EXIT_FALSE
    _print_matrix("s", w.s)
    return EXIT_OK


def cmd_cone(args) -> int:
    f_path = Path(args.mor)
    f = dfn.read_morphism(f_path)
    tri = cone(f)
    prefix = Path(args.out)
    cone_path = dfn.write_object(prefix.with_name(prefix.name + ".dfn"), tri.cone)
    sx_path = dfn.write_object(prefix.with_name(prefix.name + ".shift.dfn"), tri.shifted)
    y_path = dfn.write_object(prefix.with_name(prefix.name + ".target.dfn"), f.dst)
    dfn.write_morphism(prefix.with_name(prefix.name + ".u.dfn"), tri.u, y_path, cone_path)
    dfn.write_morphism(prefix.with_name(prefix.name + ".v.dfn"), tri.v, cone_path, sx_path)
    print(f"cone dim={tri.cone.dim} jordan {jordan_type(tri.cone)}")
    print(f"wrote {cone_path}")
    return EXIT_OK


def cmd_shift(args) -> int:
    x = dfn.read_object(args.object)
    y = coshift(x) if args.inverse else shift(x)
    path = dfn.write_object(args.out, y)
    print(f"{'coshift' if args.inverse else 'shift'} dim={y.dim} jordan {jordan_type(y)}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_qiso(args) -> int:
    f = dfn.read_morphism(args.mor)
    v = is_quasi_iso(f)
    for r, _, ok in v.per_r_witness:
        print(f"H_({r})(f) {'iso' if ok else 'not iso'}")
    print(f"cone {'acyclic' if v.cone_acyclic else 'not acyclic'}")
    print("quasi-isomorphism" if v.is_qiso else "not a quasi-isomorphism")
    return EXIT_OK if v.is_qiso else EXIT_FALSE


def cmd_les(args) -> int:
    ses = dfn.read_ses(args.ses)
    win = les(ses, args.r)
    n, r = ses.a.n, args.r
    labels = [f"H_({r})(A)", f"H_({r})(B)", f"H_({r})(C)", f"H_({n - r})(A)", f"H_({n - r})(B)", f"H_({n - r})(C)"]
    for k in range(6):
        print(f"{labels[k]} dim={win.terms[k].dim} exact={'yes' if win.exact[k] else 'no'}")
    _print_matrix(f"connecting H_({r})(C) -> H_({n - r})(A)", win.connecting)
    if not win.all_exact:
        raise InvariantFailure("long exact sequence is not exact")
    return EXIT_OK


def cmd_homdim(args) -> int:
    x, y = dfn.read_object(args.x), dfn.read_object(args.y)
    print(f"dim Hom = {hom_matrix(x, y).cols}")
    print(f"dim Hom_K = {hom_K(x, y).dim}")
    if args.derived:
        print(f"dim Hom_D = {derived_hom_dim(x, y)}")
    return EXIT_OK


def cmd_minimal(args) -> int:
    x = dfn.read_object(args.object)
    m = minimal_model(x)
    path = dfn.write_object(args.out, m.reduced)
    print(f"reduced dim={m.reduced.dim} jordan {jordan_type(m.reduced)} free_rank={m.free_rank}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_theta(args) -> int:
    x = dfn.read_object(args.object)
    res = theta_check(x, args.i)
    print(f"dim Hom_K(T^{args.i}(k), X) = {res.dim_hom_K}")
    print(f"dim H_({args.i})(X) = {res.dim_H}")
    print(f"theta {'bijective' if res.bijective else 'not bijective'}")
    return EXIT_OK if res.bijective else EXIT_FALSE


def cmd_verify(args) -> int:
    try:
        cfg = GenConfig(args.seed, FieldSpec.parse(args.field), args.n, args.max_dim, args.trials)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.only:
        unknown = [o for o in args.only if o not in REGISTRY]
        if unknown:
            raise InputError(f"unknown properties: {', '.join(unknown)}")
    if args.list:
        for name in sorted(REGISTRY):
            print(f"{name}\t{REGISTRY[name].doc}")
        return EXIT_OK
    report = run_verify(cfg, args.only, trial=args.trial, jobs=args.jobs)
    sys.stdout.write(report.body())
    if args.timings:
        sys.stderr.write(report.timings())
    return EXIT_OK if report.ok else EXIT_FALSE


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diffn", description="Exact computations with n-th differential objects.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check that a DFN-1 file parses and satisfies its invariants")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("jordan", help="Jordan type and rank sequence of an object")
    p.add_argument("object")
    p.set_defaults(func=cmd_jordan)

    p = sub.add_parser("homology", help="dimensions of H_(r)")
    p.add_argument("object")
    p.add_argument("--r", default="all")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("homotopic", help="decide whether two morphisms are homotopic")
    p.add_argument("mor_a")
    p.add_argument("mor_b")
    p.set_defaults(func=cmd_homotopic)

    p = sub.add_parser("nullhomotopy", help="print a null-homotopy witness s, or NONE")
    p.add_argument("mor")
    p.set_defaults(func=cmd_nullhomotopy)

    p = sub.add_parser("cone", help="write the mapping cone and its triangle maps")
    p.add_argument("mor")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("shift", help="write the shift (or with --inverse the coshift) of an object")
    p.add_argument("object")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("qiso", help="decide whether a morphism is a quasi-isomorphism")
    p.add_argument("mor")
    p.set_defaults(func=cmd_qiso)

    p = sub.add_parser("les", help="the exact homology hexagon of a short exact sequence")
    p.add_argument("ses")
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=cmd_les)

    p = sub.add_parser("homdim", help="dimensions of Hom, Hom_K and optionally Hom_D")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--derived", action="store_true")
    p.set_defaults(func=cmd_homdim)

    p = sub.add_parser("minimal", help="write the reduced part of an object")
    p.add_argument("object")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_minimal)

    p = sub.add_parser("theta", help="compare Hom_K(T^i(k), X) with H_(i)(X)")
    p.add_argument("object")
    p.add_argument("--i", type=int, required=True)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("verify", help="run the seeded property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--field", default="2")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--max-dim", type=int, default=12)
    p.add_argument("--only", action="append", metavar="PROPERTY", help="run only this property (repeatable)")
    p.add_argument("--trial", type=int, help="replay a single trial index")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--timings", action="store_true", help="per-property wall times on stderr")
    p.add_argument("--list", action="store_true", help="list property names and exit")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantFailure as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
