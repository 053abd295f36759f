"""Command-line front end.

Exit codes: 0 positive verdict, 1 negative verdict, 2 precondition failed
(or undecided), 3 input error.
"""

import argparse
import json
import sys

from . import blocks
from .errors import NotSelfAdjoint, NumericallySingular, OpSignError, OrderTooSmall
from .extremum import Classification, classify_critical_point, classify_hessian, example_l2_functional
from .linalg import DEFAULT_TOL
from .oracle import count_disagreements, sweep, write_sweep_csv
from .schur_first import Verdict, check_pd, count_inequalities, recursion_depth, schur_first
from .schur_second import NNVerdict, check_nn, schur_second
from .small import check_pd_bidiagonal, is_bidiagonal

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_PRECONDITION, EXIT_INPUT = 0, 1, 2, 3

TOL_KEYS = ("sym_tol", "pd_eps", "inv_tol", "nn_tol")


class InputError(Exception):
    pass


def _tolerances(pairs):
    kw = {}
    for pair in pairs or ():
        key, sep, val = pair.partition("=")
        if not sep or key not in TOL_KEYS:
            raise InputError(f"--tol expects KEY=VALUE with KEY in {', '.join(TOL_KEYS)}; got {pair!r}")
        try:
            kw[key] = float(val)
        except ValueError:
            raise InputError(f"--tol {key}: {val!r} is not a number") from None
    try:
        return DEFAULT_TOL.with_overrides(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _load(path, tol):
    try:
        return blocks.load(path, tol)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except blocks.FormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(payload):
    sys.stdout.write(payload)
    if not payload.endswith("\n"):
        sys.stdout.write("\n")


def cmd_check(args):
    tol = _tolerances(args.tol)
    b = _load(args.file, tol)
    if not b.self_adjoint:
        print(f"{args.file}: matrix is not self-adjoint within sym_tol={tol.sym_tol:g}", file=sys.stderr)
        return EXIT_PRECONDITION
    mode = "full_tree" if args.full_tree else "early_exit"
    if args.kind == "pd":
        cert = check_pd(b, tol, mode)
        bidiag = check_pd_bidiagonal(b, tol) if b.n >= 2 and is_bidiagonal(b, tol) else None
        if args.json:
            doc = cert.to_dict()
            if bidiag is not None:
                doc["bidiagonal"] = bidiag.to_dict()
            _emit(json.dumps(doc, indent=2, ensure_ascii=False))
        else:
            _emit(cert.render())
            if bidiag is not None:
                _emit(f"bidiagonal structure detected: {bidiag.leaf_count} checks suffice")
                _emit(bidiag.render())
        return {Verdict.POSITIVE_DEFINITE: EXIT_POSITIVE,
                Verdict.NOT_POSITIVE_DEFINITE: EXIT_NEGATIVE}.get(cert.verdict, EXIT_PRECONDITION)
    cert = check_nn(b, tol)
    _emit(cert.to_json() if args.json else cert.render())
    return {NNVerdict.NONNEGATIVE: EXIT_POSITIVE,
            NNVerdict.NOT_NONNEGATIVE: EXIT_NEGATIVE}.get(cert.verdict, EXIT_PRECONDITION)


def cmd_count(args):
    if args.n < 1:
        raise InputError("n must be >= 1")
    print(count_inequalities(args.n))
    return 0


def cmd_depth(args):
    if args.n < 1:
        raise InputError("n must be >= 1")
    print(recursion_depth(args.n))
    return 0


def cmd_schur(args):
    tol = _tolerances(args.tol)
    b = _load(args.file, tol)
    try:
        if args.kind == "first":
            if args.i is None or args.j is None:
                raise InputError("--kind first needs --i and --j")
            out = schur_first(b, args.i, args.j, tol)
        else:
            i, j = (2, 1) if args.i is None and args.j is None else (args.i, args.j)
            if (i, j) == (1, 1):
                out = b.sub(range(1))
            elif (i, j) in ((2, 1), (1, 2)):
                # (1, 2) accepted as an alias: both name the elimination step
                out = schur_second(b, tol)
            else:
                raise InputError("second-kind operators are (1,1) (corner) and (2,1) (elimination)")
    except NumericallySingular as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OrderTooSmall as exc:
        raise InputError(str(exc)) from None
    _emit(blocks.dumps(out))
    return 0


def cmd_classify(args):
    tol = _tolerances(args.tol)
    if args.example is not None:
        if args.trunc is None or args.trunc < 2:
            raise InputError("--example l2 needs --trunc N with N >= 2")
        report = classify_critical_point(example_l2_functional(args.trunc), None, tol, args.step)
    else:
        hess = _load(args.hessian, tol)
        try:
            report = classify_hessian(hess, tol)
        except NotSelfAdjoint as exc:
            print(f"{args.hessian}: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
    _emit(report.to_json() if args.json else report.render())
    if report.classification in (Classification.STRONG_LOCAL_MIN, Classification.STRONG_LOCAL_MAX):
        return EXIT_POSITIVE
    if report.classification in (Classification.NOT_A_MIN, Classification.NOT_A_MAX):
        return EXIT_NEGATIVE
    return EXIT_PRECONDITION


def _seed_range(text):
    lo, sep, hi = text.partition("..")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        sep = ""
    if not sep:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")
    return range(lo, hi + 1)


def cmd_sweep(args):
    rows = sweep(args.seeds, args.n_max, args.max_dim, _tolerances(args.tol))
    try:
        with open(args.out, "w", newline="") as fh:
            write_sweep_csv(rows, fh)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    bad = count_disagreements(rows)
    print(f"{len(rows)} instances, {bad} disagreements -> {args.out}")
    return EXIT_NEGATIVE if bad else 0


def build_parser():
    p = argparse.ArgumentParser(prog="opsign", description="Sign criteria for block operator matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    def tol_opt(sp):
        sp.add_argument("--tol", action="append", metavar="KEY=VAL",
                        help=f"override a tolerance ({', '.join(TOL_KEYS)}); repeatable")

    c = sub.add_parser("check", help="certify positive definiteness (pd) or nonnegativity (nn)")
    c.add_argument("kind", choices=("pd", "nn"))
    c.add_argument("file")
    c.add_argument("--json", action="store_true")
    c.add_argument("--full-tree", action="store_true", help="evaluate every check, not just up to the first failure")
    tol_opt(c)
    c.set_defaults(func=cmd_check)

    for name, fn, helptext in (("count", cmd_count, "number of leaf checks V_n"),
                               ("depth", cmd_depth, "recursion depth m")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("n", type=int)
        s.set_defaults(func=fn)

    s = sub.add_parser("schur", help="apply one Schur operator and print the result")
    s.add_argument("file")
    s.add_argument("--kind", choices=("first", "second"), required=True)
    s.add_argument("--i", type=int, choices=(1, 2))
    s.add_argument("--j", type=int, choices=(1, 2))
    tol_opt(s)
    s.set_defaults(func=cmd_schur)

    k = sub.add_parser("classify", help="classify a critical point")
    src = k.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", choices=("l2",))
    src.add_argument("--hessian", metavar="FILE")
    k.add_argument("--trunc", type=int)
    k.add_argument("--step", type=float)
    k.add_argument("--json", action="store_true")
    tol_opt(k)
    k.set_defaults(func=cmd_classify)

    w = sub.add_parser("sweep", help="seeded oracle comparison, written as CSV")
    w.add_argument("--seeds", type=_seed_range, required=True, metavar="A..B")
    w.add_argument("--n-max", type=int, default=6)
    w.add_argument("--max-dim", type=int, default=4)
    w.add_argument("--out", required=True)
    tol_opt(w)
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OpSignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
