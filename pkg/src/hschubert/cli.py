"""Command-line front end.

Subcommands:

  lr      structure-constant tables or single coefficients
  ortho   orthogonality Gram-matrix verification
  check   identity checks: fay, gkm, limit83, theta-deriv

Exit codes: 0 pass, 1 identity violation, 2 usage error, 3 computational
anomaly (non-polynomial reduction or extrapolation failure).  JSON output is
the stable machine format; text output is human-oriented.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import elliptic as ell
from .flags import FlagShape, IndexTuple, partition_to_subset
from .pairing import max_deviation, orthogonality_check
from .structure import (LRTable, NonPolynomial, elliptic_pn_closed_form,
                        expand_product, lr_coefficient, pn_shape, pn_tuple,
                        render_table)
from .weights import Theory

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_ANOMALY = 3

THEORIES = {"fund": Theory.FUND, "h": Theory.H, "k": Theory.K, "ell": Theory.ELL}


class UsageError(Exception):
    pass


def _parse_shape(args) -> FlagShape:
    if getattr(args, "grassmann", None):
        m, n = (int(x) for x in args.grassmann.split(","))
        return FlagShape.grassmann(m, n)
    if getattr(args, "pn", None):
        return pn_shape(args.pn)
    if getattr(args, "lam", None):
        return FlagShape(tuple(int(x) for x in args.lam.split(",")))
    raise UsageError("one of --lambda, --grassmann, --pn is required")


def _parse_tuple(text: str, shape: FlagShape) -> IndexTuple:
    text = text.strip()
    if text.startswith("("):
        if shape.N != 2:
            raise UsageError("partition input needs a Grassmannian shape")
        lam = tuple(int(x) for x in text.strip("()").split(",") if x.strip())
        m, n = shape.lambdas[0], shape.n
        first = partition_to_subset(lam, m, n)
        rest = tuple(x for x in range(1, n + 1) if x not in first)
        return IndexTuple((tuple(first), rest))
    return IndexTuple.from_label(text)


def _context(args, shape: FlagShape) -> ell.EllipticContext:
    return ell.generic_context(shape, q=args.q, trunc=args.trunc,
                               tol=args.tol, seed=args.seed)


def _emit(args, doc: dict, text: str):
    if args.format == "json":
        print(json.dumps(doc, sort_keys=False))
    else:
        print(text)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--lambda", dest="lam", help="shape, e.g. 1,2")
    p.add_argument("--grassmann", help="m,n for Gr(m,n)")
    p.add_argument("--pn", type=int, help="projective space with n fixed points")
    p.add_argument("--q", type=float, default=0.1)
    p.add_argument("--trunc", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("HSCHUBERT_THREADS", "1")))


def cmd_lr(args) -> int:
    theory = THEORIES[args.theory]
    shape = _parse_shape(args)
    if theory is Theory.ELL and args.pn and args.k and args.k.isdigit():
        ctx = _context(args, shape)
        k, l, m = int(args.k), int(args.l), int(args.m)
        val = lr_coefficient(Theory.ELL, shape, pn_tuple(args.pn, k),
                             pn_tuple(args.pn, l), pn_tuple(args.pn, m), ctx)
        doc = {"schema": 1, "theory": "ell", "pn": args.pn,
               "k": k, "l": l, "m": m,
               "value": [val.real, val.imag],
               "meta": {"q": args.q, "trunc": args.trunc, "tol": args.tol,
                        "seed": args.seed}}
        _emit(args, doc, f"LR_{k},{l}^{m} = ({val.real:+.12e}, {val.imag:+.12e})")
        return EXIT_OK
    if not args.i or not args.j:
        raise UsageError("--i and --j are required")
    I = _parse_tuple(args.i, shape)
    J = I if args.j == "same" else _parse_tuple(args.j, shape)
    ctx = _context(args, shape) if theory is Theory.ELL else None
    if args.k:
        K = I if args.k == "same" else _parse_tuple(args.k, shape)
        val = lr_coefficient(theory, shape, I, J, K, ctx)
        if theory is Theory.ELL:
            value_json = [val.real, val.imag]
            text = f"({val.real:+.12e}, {val.imag:+.12e})"
        else:
            value_json = val.to_str()
            text = val.to_str()
        doc = {"schema": 1, "theory": args.theory,
               "lambda": list(shape.lambdas),
               "i": I.label(), "j": J.label(), "k": K.label(),
               "coefficient": value_json,
               "meta": {"specialize": args.specialize or "none"}}
        _emit(args, doc, text)
        return EXIT_OK
    table = expand_product(theory, shape, I, J, ctx,
                           specialize=args.specialize, threads=args.threads)
    _emit(args, json.loads(render_table(table, "json")),
          render_table(table, "text"))
    return EXIT_OK


def cmd_ortho(args) -> int:
    theory = THEORIES[args.theory]
    shape = _parse_shape(args)
    if theory is Theory.ELL:
        def run(ctx):
            return max_deviation(orthogonality_check(Theory.ELL, shape, ctx))
        dev, ctx = ell.retrying(shape, run, q=args.q, trunc=args.trunc,
                                tol=args.tol, seed=args.seed)
        gate = args.gate if args.gate is not None else 10 * args.tol
        ok = dev < gate
        doc = {"schema": 1, "command": "ortho", "theory": args.theory,
               "lambda": list(shape.lambdas), "max_deviation": dev,
               "gate": gate, "pass": ok,
               "meta": {"q": args.q, "trunc": args.trunc, "tol": args.tol,
                        "seed": ctx.seed}}
        _emit(args, doc, f"max deviation {dev:.3e} ({'pass' if ok else 'FAIL'})")
        return EXIT_OK if ok else EXIT_VIOLATION
    matrix = orthogonality_check(theory, shape)
    tuples_n = len(matrix)
    bad = []
    for i in range(tuples_n):
        for j in range(tuples_n):
            if not matrix[i][j].is_zero():
                bad.append((i, j))
    doc = {"schema": 1, "command": "ortho", "theory": args.theory,
           "lambda": list(shape.lambdas), "size": tuples_n,
           "violations": bad, "pass": not bad, "meta": {}}
    if bad:
        _emit(args, doc, f"orthogonality FAILED at entries {bad[:5]}")
        return EXIT_VIOLATION
    _emit(args, doc, f"exact {tuples_n}x{tuples_n} identity (pass)")
    return EXIT_OK


def cmd_check(args) -> int:
    shape = _parse_shape(args) if (args.lam or args.grassmann or args.pn) \
        else FlagShape((1, 1))
    if args.what == "fay":
        worst = 0.0
        ctx0 = ell.generic_context(shape, q=args.q, trunc=args.trunc,
                                   tol=args.tol, seed=args.seed)
        import random
        rng = random.Random(args.seed)
        from .scalars import muvar, zvar
        for _ in range(args.points):
            logs = {v: complex(rng.uniform(-0.3, 0.3), rng.uniform(0.3, 5.9))
                    for v in (zvar(1), zvar(2), muvar(1), muvar(2))}
            ctx = ctx0.with_logs(logs)
            r = ell.fay_residual(ell.Mono.of({zvar(1): 1}), ell.Mono.of({zvar(2): 1}),
                                 ell.Mono.of({muvar(1): 1}), ell.Mono.of({muvar(2): 1}),
                                 ctx)
            worst = max(worst, abs(r))
        ok = worst < args.tol
        doc = {"schema": 1, "command": "check", "what": "fay",
               "points": args.points, "max_residual": worst, "pass": ok,
               "meta": {"q": args.q, "trunc": args.trunc, "seed": args.seed}}
        _emit(args, doc, f"fay max residual {worst:.3e} ({'pass' if ok else 'FAIL'})")
        return EXIT_OK if ok else EXIT_VIOLATION
    if args.what == "gkm":
        theory = THEORIES[args.theory]
        from .flags import Permutation, enumerate_tuples
        ident = Permutation.identity(shape.n)
        if theory is Theory.ELL:
            def run(ctx):
                return max(ell.gkm_check_numeric(shape, I, ident, ctx)
                           for I in enumerate_tuples(shape))
            worst, ctx = ell.retrying(shape, run, q=args.q, trunc=args.trunc,
                                      tol=args.tol, seed=args.seed)
            gate = args.gate if args.gate is not None else 10 * args.tol
            ok = worst < gate
            doc = {"schema": 1, "command": "check", "what": "gkm",
                   "theory": args.theory, "lambda": list(shape.lambdas),
                   "max_residual": worst, "pass": ok,
                   "meta": {"q": args.q, "trunc": args.trunc, "seed": ctx.seed}}
            _emit(args, doc,
                  f"gkm max residual {worst:.3e} ({'pass' if ok else 'FAIL'})")
            return EXIT_OK if ok else EXIT_VIOLATION
        from .weights import class_tuple, gkm_check
        violations = []
        for I in enumerate_tuples(shape):
            violations.extend(gkm_check(class_tuple(theory, shape, I, ident)))
        ok = not violations
        doc = {"schema": 1, "command": "check", "what": "gkm",
               "theory": args.theory, "lambda": list(shape.lambdas),
               "violations": len(violations), "pass": ok, "meta": {}}
        _emit(args, doc, f"gkm exact ({'pass' if ok else 'FAIL'})")
        return EXIT_OK if ok else EXIT_VIOLATION
    if args.what == "limit83":
        def run(ctx):
            return ell.removable_limit(ctx)
        val, ctx = ell.retrying(FlagShape((1, 1)), run, q=args.q,
                                trunc=args.trunc, tol=args.tol, seed=args.seed)
        doc = {"schema": 1, "command": "check", "what": "limit83",
               "value": [val.real, val.imag], "pass": True,
               "meta": {"q": args.q, "trunc": args.trunc, "seed": ctx.seed}}
        _emit(args, doc, f"limit = ({val.real:+.12e}, {val.imag:+.12e})")
        return EXIT_OK
    if args.what == "theta-deriv":
        ctx = ell.generic_context(FlagShape((1, 1)), q=args.q, trunc=args.trunc,
                                  tol=args.tol, seed=args.seed)
        tp1 = ctx.theta_prime_1()
        eps = 1e-4
        fd = []
        for s in range(3):
            e = eps / 2 ** s
            fd.append((ctx.theta_log(e) - ctx.theta_log(-e)) / (2 * e))
        best = ell.extrapolate_to_zero([eps / 2 ** s for s in range(3)], fd, 1e-6)
        resid = abs(best - tp1)
        ok = resid < args.tol
        doc = {"schema": 1, "command": "check", "what": "theta-deriv",
               "residual": resid, "pass": ok,
               "meta": {"q": args.q, "trunc": args.trunc}}
        _emit(args, doc, f"theta'(1) residual {resid:.3e} ({'pass' if ok else 'FAIL'})")
        return EXIT_OK if ok else EXIT_VIOLATION
    raise UsageError(f"unknown check {args.what!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hschubert")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lr", help="structure constants")
    p.add_argument("--theory", choices=tuple(THEORIES), required=True)
    _add_common(p)
    p.add_argument("--i")
    p.add_argument("--j")
    p.add_argument("--k", help="output tuple/partition, 'same', or integer (pn mode)")
    p.add_argument("--l", help="second input index (pn mode)")
    p.add_argument("--m", help="output index (pn mode)")
    p.add_argument("--specialize", choices=("z0", "z1"))
    p.set_defaults(fn=cmd_lr)

    p = sub.add_parser("ortho", help="orthogonality Gram check")
    p.add_argument("--theory", choices=tuple(THEORIES), required=True)
    _add_common(p)
    p.add_argument("--gate", type=float, help="pass threshold (elliptic)")
    p.set_defaults(fn=cmd_ortho)

    p = sub.add_parser("check", help="identity checks")
    p.add_argument("what", choices=("fay", "gkm", "limit83", "theta-deriv"))
    p.add_argument("--theory", choices=tuple(THEORIES), default="ell")
    _add_common(p)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--gate", type=float)
    p.set_defaults(fn=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonPolynomial, ell.NonConvergence) as exc:
        print(f"computational anomaly: {exc}", file=sys.stderr)
        return EXIT_ANOMALY


if __name__ == "__main__":
    sys.exit(main())
