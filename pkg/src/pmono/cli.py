"""Command-line frontend.

Exit codes: 0 every requested predicate holds (or the verification
passes), 1 a predicate fails, 2 unreadable input or bad arguments,
3 a resource cap was exceeded.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import finite_op as fo
from . import instances
from . import linear_rel as lr
from . import product_op as po
from .finite_op import FiniteOperator, GridTooLarge, Pair
from .linear_rel import AffineRelation, LinearRelation, NotPMonotoneError
from .serialize import ParseError, dumps, loads
from .verdict import Decision, Verdict, jsonable

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(args):
    return loads(_read(args.input))


def _emit(text: str, args):
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_grid(text: str):
    """``"xmin:xmax:step,..."`` to a list of float triples."""
    out = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 3:
            raise UsageError(f"grid axis {part!r} is not xmin:xmax:step")
        out.append(tuple(float(b) for b in bits))
    return out


def parse_point(text: str) -> Pair:
    """``"x1,x2;xs1,xs2"`` to a pair."""
    try:
        xs, xss = text.split(";")
        return Pair([float(t) for t in xs.split(",")],
                    [float(t) for t in xss.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from exc


def _need_linear(op, what):
    if isinstance(op, AffineRelation):
        op = op.direction
    if not isinstance(op, LinearRelation):
        raise UsageError(f"{what} needs a linear relation")
    return op


def cmd_check(args):
    op = _load(args)
    preds = {}
    p = args.p
    if isinstance(op, FiniteOperator):
        if args.maximal or args.premaximal:
            raise UsageError("--maximal/--premaximal need a linear relation")
        if args.monotone:
            preds["monotone"] = fo.is_p_monotone(op, 1, args.tol)
        if args.cyclic:
            preds["cyclically_monotone"] = fo.is_cyclically_monotone(op, args.tol)
        if p is not None or not preds:
            preds[f"{p or 1}_monotone"] = fo.is_p_monotone(op, p or 1, args.tol)
    else:
        if args.cyclic:
            raise UsageError("--cyclic needs a finite operator")
        rel = _need_linear(op, "check")
        p = p or 1
        if args.monotone:
            preds["monotone"] = lr.is_monotone_linear(rel, args.tol)
        if args.maximal:
            preds[f"maximal_{p}_monotone"] = \
                lr.is_maximal_p_monotone_linear(rel, p, args.tol)
        if args.premaximal:
            if args.seed is None:
                raise UsageError("--premaximal samples randomly; pass --seed")
            try:
                preds[f"premaximal_{p}_monotone"] = lr.is_premaximal_linear(
                    rel, p, args.budget or 256, args.tol, args.seed)
            except NotPMonotoneError as exc:
                preds[f"premaximal_{p}_monotone"] = Verdict(
                    Decision.FAILS, note=str(exc))
        if args.p is not None or not preds:
            preds[f"{p}_monotone"] = lr.is_p_monotone_linear(rel, p, args.tol)
    ok = all(v.holds for v in preds.values())
    report = {"instance": op.to_dict(), "p": p,
              "predicates": {k: v.to_dict() for k, v in preds.items()},
              "pass": ok}
    _emit(dumps(report), args)
    return EXIT_OK if ok else EXIT_FAIL


def _grid_for(op, p, grid, tol):
    if isinstance(op, FiniteOperator):
        return fo.polar_region_grid(op, p, grid, tol)
    aff = op if isinstance(op, AffineRelation) else AffineRelation(
        Pair(np.zeros(op.dim), np.zeros(op.dim)), op)
    d = aff.dim
    pts = fo._lattice(fo.grid_axes(grid, 2 * d))
    ex = np.array([lr.polar_membership_affine(aff, p, Pair(z[:d], z[d:]),
                                              tol).value for z in pts])
    return fo.GridResult(d, pts, ex <= tol, ex)


def cmd_polar(args):
    op = _load(args)
    if not args.grid:
        raise UsageError("polar needs --grid")
    res = _grid_for(op, args.p or 1, parse_grid(args.grid),
                    1e-9 if args.tol is None else args.tol)
    _emit(res.to_csv() if args.format == "csv" else dumps(res.to_dict()), args)
    return EXIT_OK


def cmd_fitz(args):
    op = _load(args)
    if not isinstance(op, FiniteOperator):
        raise UsageError("fitz needs a finite operator")
    order = args.p_text or "1"
    if args.at:
        queries = [parse_point(t) for t in args.at]
    elif args.grid:
        pts = fo._lattice(fo.grid_axes(parse_grid(args.grid), 2 * op.dim))
        queries = [Pair(z[:op.dim], z[op.dim:]) for z in pts]
    else:
        raise UsageError("fitz needs --at or --grid")
    vals = []
    for q in queries:
        if order == "inf":
            v = fo.fitzpatrick_inf(op, q, args.tol)
        else:
            v = fo.fitzpatrick_p(op, int(order), q)
        vals.append({"x": q.to_dict()["x"], "xstar": q.to_dict()["xstar"],
                     "value": jsonable(v)})
    _emit(dumps({"p": order, "values": vals}), args)
    return EXIT_OK


def cmd_extend(args):
    rel = _need_linear(_load(args), "extend")
    _emit(dumps(lr.maximalize(rel)), args)
    return EXIT_OK


def cmd_adjoint(args):
    rel = _need_linear(_load(args), "adjoint")
    _emit(dumps(lr.adjoint(rel)), args)
    return EXIT_OK


def cmd_product(args):
    rel = _need_linear(_load(args), "product")
    prod = po.build_product(rel, args.p or 1, args.sign)
    data = prod.relation.to_dict()
    data["product"] = {"p": prod.p, "inner_dim": prod.inner_dim,
                       "sign": prod.sign}
    _emit(dumps(data), args)
    return EXIT_OK


def cmd_bb(args):
    rel = _need_linear(_load(args), "bb")
    rep = po.brezis_browder_verify(rel, args.p or 1, args.tol)
    _emit(dumps(rep), args)
    return EXIT_OK if rep["equivalence"] == "pass" else EXIT_FAIL


def cmd_verify(args):
    op = _load(args)
    p = args.p or 1
    if args.which == "transfer" and isinstance(op, FiniteOperator):
        rep = po.verify_transfer_finite(op, p, args.tol)
    else:
        rel = _need_linear(op, "verify")
        fn = {"transfer": po.verify_transfer, "maxtp": po.verify_maxtp,
              "inclusion": po.verify_adjoint_inclusion,
              "bb": po.brezis_browder_verify}[args.which]
        rep = fn(rel, p) if args.tol is None else fn(rel, p, args.tol)
    _emit(dumps(rep), args)
    return EXIT_OK if rep["equivalence"] == "pass" else EXIT_FAIL


def cmd_falsify(args):
    op = _load(args)
    if not isinstance(op, FiniteOperator):
        raise UsageError("falsify needs a finite operator")
    if not args.at:
        raise UsageError("falsify needs --at")
    if args.seed is None:
        raise UsageError("falsify samples randomly; pass --seed")
    out = []
    for text in args.at:
        q = parse_point(text)
        v = fo.falsify_double_polar(op, args.p or 1, q,
                                    100_000 if args.budget is None else args.budget,
                                    args.tol, args.seed)
        out.append({"q": q.to_dict(), "verdict": v.to_dict()})
    _emit(dumps({"p": args.p or 1, "results": out}), args)
    return EXIT_FAIL if any(r["verdict"]["decision"] == "fails" for r in out) \
        else EXIT_OK


def cmd_gen(args):
    if args.named:
        op = instances.named(args.named, args.dim or 1)
    elif args.random:
        if args.seed is None:
            raise UsageError("--random needs --seed")
        rng = np.random.default_rng(args.seed)
        d = args.dim or 2
        if args.random == "finite":
            op = instances.random_finite(rng, args.n or 5, d,
                                         args.family or "any")
        else:
            op = instances.random_linear(rng, d, args.family or "monotone")
    else:
        raise UsageError("gen needs --named or --random")
    _emit(dumps(op), args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmono", description="p-monotone operator toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--input", "-i", default="-",
                        help="operator JSON file ('-' for stdin)")
        sp.add_argument("--output", "-o", help="write here instead of stdout")
        sp.add_argument("--tol", type=float)
        return sp

    sp = add("check", cmd_check, "decide monotonicity predicates")
    sp.add_argument("--p", type=int)
    sp.add_argument("--monotone", action="store_true")
    sp.add_argument("--cyclic", action="store_true")
    sp.add_argument("--maximal", action="store_true")
    sp.add_argument("--premaximal", action="store_true")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--budget", type=int)

    sp = add("polar", cmd_polar, "polar membership mask on a lattice")
    sp.add_argument("--p", type=int)
    sp.add_argument("--grid")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = add("fitz", cmd_fitz, "Fitzpatrick function values")
    sp.add_argument("--p", dest="p_text", help="order, or 'inf'")
    sp.add_argument("--at", action="append", help="point 'x1,..;xs1,..'")
    sp.add_argument("--grid")

    add("extend", cmd_extend, "canonical maximal extension")
    add("adjoint", cmd_adjoint, "adjoint relation")

    sp = add("product", cmd_product, "product relation T_{p+-}")
    sp.add_argument("--p", type=int)
    sp.add_argument("--sign", choices=("plus", "minus"), default="plus")

    sp = add("bb", cmd_bb, "Brezis-Browder equivalence report")
    sp.add_argument("--p", type=int)

    sp = add("verify", cmd_verify, "product-operator equivalence reports")
    sp.add_argument("--p", type=int)
    sp.add_argument("--which", choices=("transfer", "maxtp", "inclusion", "bb"),
                    default="transfer")

    sp = add("falsify", cmd_falsify, "exclude points from the double polar")
    sp.add_argument("--p", type=int)
    sp.add_argument("--at", action="append")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--budget", type=int)

    sp = add("gen", cmd_gen, "emit named or seeded random operators")
    sp.add_argument("--named", choices=instances.NAMED)
    sp.add_argument("--random", choices=("finite", "linear"))
    sp.add_argument("--family")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--dim", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GridTooLarge as exc:
        print(f"pmono: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParseError, UsageError, OSError, ValueError) as exc:
        print(f"pmono: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
