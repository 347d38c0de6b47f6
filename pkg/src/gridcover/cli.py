"""``gridcover`` command line.

Exit codes: 0 success, 1 a verification or check failed, 2 bad usage or
input, 3 the solver budget ran out.
"""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import certificates as certs
from .constructions import construct, verify_cover, write_cover
from .errors import GridCoverError
from .geometry import enumerate_lines, restricted_lines
from .grid import delta_genericity, generic_grid, grid_from_json, named_grid, standard_grid
from .harness import check_rows, experiment_suite, export_results, get_experiment, run_experiment
from .optimize import CoverInstance, default_time_limit, reference_bounds, solve_dual, solve_ilp, solve_primal

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _num(q, as_float: bool) -> str:
    text = str(q)
    if as_float and isinstance(q, Fraction) and q.denominator != 1:
        text += f" (approx {float(q):.6f})"
    return text


def _add_grid_options(p: argparse.ArgumentParser, required: bool = True) -> None:
    grp = p.add_mutually_exclusive_group(required=required)
    grp.add_argument("--standard", type=int, metavar="N", help="the grid {0..N-1}^2")
    grp.add_argument("--exp", type=int, metavar="N", help="axes {0,1,2,4,...,2^(N-2)}")
    grp.add_argument("--quad", type=int, metavar="N", help="axes {0,1,4,...,(N-1)^2}")
    grp.add_argument("--generic", type=int, nargs=2, metavar=("N", "M"), help="seeded generic N x M grid")
    grp.add_argument("--file", type=Path, metavar="PATH", help="grid JSON document")
    p.add_argument("--seed", type=int, default=0, help="seed for --generic (default 0)")


def _grid(args):
    if args.standard is not None:
        return standard_grid(args.standard)
    if args.exp is not None:
        return named_grid("exponential", args.exp)
    if args.quad is not None:
        return named_grid("quadratic", args.quad)
    if args.generic is not None:
        return generic_grid(args.generic[0], args.generic[1], args.seed)
    if args.file is not None:
        return grid_from_json(args.file.read_text(encoding="utf-8"))
    return None


def _instance(args, k: int = 1) -> CoverInstance:
    g = _grid(args)
    if args.family == "restricted":
        return CoverInstance.restricted(g, k)
    return CoverInstance.full(g, k)


def cmd_lines(args) -> int:
    g = _grid(args)
    fam = restricted_lines(g) if args.family == "restricted" else enumerate_lines(g)
    print(len(fam))
    for line, inc in zip(fam.lines, fam.incidence):
        print(f"{line}\t{line.describe()}\t{len(inc)}")
    return EXIT_OK


def cmd_phi(args) -> int:
    inst = _instance(args)
    sol = solve_primal(inst)
    print(_num(sol.value, args.float))
    if args.dual:
        value, w = solve_dual(inst)
        for p, v in zip(inst.family.points, w):
            if v:
                print(f"{p}\t{_num(v, args.float)}")
    return EXIT_OK


def cmd_cov(args) -> int:
    inst = _instance(args, args.k)
    warm = None
    if args.warm_start:
        warm = construct(args.warm_start, inst.grid, args.k, args.t)
    budget = args.budget if args.budget is not None else default_time_limit()
    res = solve_ilp(inst, warm_start=warm, node_limit=args.nodes, time_limit=budget)
    if not verify_cover(inst.grid, res.cover).valid:
        print("solver returned an invalid cover", file=sys.stderr)
        return EXIT_FAIL
    if args.output:
        write_cover(args.output, res.cover, inst.grid)
    if not res.optimal:
        print(f"timeout best={res.optimum} lower={res.lower_bound} nodes={res.nodes_explored}")
        return EXIT_BUDGET
    print(res.optimum)
    if args.verbose:
        print(f"# nodes={res.nodes_explored} phi={res.lp_root}", file=sys.stderr)
    return EXIT_OK


def cmd_construct(args) -> int:
    g = _grid(args)
    if g is None:
        if args.n is None:
            raise UsageError("give a grid option or n")
        g = standard_grid(args.n)
    c = construct(args.kind, g, args.k, args.t)
    check = verify_cover(g, c)
    print(f"size={c.size} valid={str(check.valid).lower()}")
    if args.output:
        write_cover(args.output, c, g)
    return EXIT_OK if check.valid else EXIT_FAIL


def _certify_grid(args):
    g = _grid(args)
    if g is None:
        if args.n is None:
            raise UsageError(f"certify {args.kind} needs n or a grid option")
        g = standard_grid(args.n)
    return g


def cmd_certify(args) -> int:
    kind = args.kind
    g = _certify_grid(args)
    prefix = ""
    if kind == "restricted":
        if not g.is_standard:
            raise UsageError("the restricted certificate lives on a standard grid")
        cert = certs.weight_restricted(g.n, args.t, g)
        w, fam = cert.weighting, restricted_lines(g)
        prefix = f"t={cert.t} z={cert.z} "
    else:
        fam = enumerate_lines(g)
        if kind == "generic":
            w = certs.weight_generic(g)
        elif kind == "square-claim":
            w = certs.weight_square_claim(g, args.t)
        elif kind == "delta":
            delta = args.delta if args.delta is not None else delta_genericity(g)
            w = certs.weight_delta_generic(g, delta)
            prefix = f"delta={delta} "
        else:
            if not g.is_standard:
                raise UsageError("the standard certificate lives on a standard grid")
            w = certs.weight_standard(g.n, g)
            prefix = f"t={certs.standard_t(g.n)} "
    check = certs.verify_weighting(g, fam, w)
    print(f"{prefix}total={_num(w.total, args.float)} feasible={str(check.feasible).lower()}")
    if args.output:
        Path(args.output).write_text(certs.weighting_to_json(w), encoding="utf-8")
    if args.audit_full:
        report = certs.audit_weighting(g, w)
        print(f"full-family violations={len(report.check.violations)}")
        for slope in report.violating_slopes:
            lines = report.by_slope[slope]
            shown = ", ".join(f"{ln.describe()} ({wt})" for ln, wt in lines[:5])
            print(f"  slope {slope}: {len(lines)} lines, e.g. {shown}")
    return EXIT_OK if check.feasible else EXIT_FAIL


def cmd_delta(args) -> int:
    print(delta_genericity(_grid(args)))
    return EXIT_OK


def cmd_bounds(args) -> int:
    b = reference_bounds(_grid(args), args.k)
    print(f"trivial_lower={b.trivial_lower}")
    print(f"trivial_upper={b.trivial_upper}")
    print(f"ball_serra={b.ball_serra}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    specs = experiment_suite() if args.id.lower() == "all" else [get_experiment(args.id)]
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    failures = []
    timeouts = 0
    for spec in specs:
        if args.budget is not None:
            spec = type(spec)(spec.id, spec.title, spec.cells, budget_secs=args.budget)
        rows = run_experiment(spec, jobs=args.jobs)
        export_results(rows, "csv", out / f"{spec.id}.csv")
        export_results(rows, "json", out / f"{spec.id}.json")
        bad = check_rows(rows)
        timeouts += sum(r.ilp_status == "timeout" for r in rows)
        failures += bad
        print(f"{spec.id} {spec.title}: {len(rows)} cells, {len(bad)} failures")
    for msg in failures:
        print(f"  FAIL {msg}")
    if failures:
        return EXIT_FAIL
    return EXIT_BUDGET if timeouts else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridcover", description="Exact line covers of rational grids.")
    parser.add_argument("--float", action="store_true", help="append approximate decimals to exact output")
    parser.add_argument("-v", "--verbose", action="store_true")
    # the same flags after the subcommand; SUPPRESS keeps the top-level value otherwise
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--float", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = command("lines", help="list the origin-avoiding lines of a grid")
    _add_grid_options(p)
    p.add_argument("--family", choices=("full", "restricted"), default="full")
    p.set_defaults(func=cmd_lines)

    p = command("phi", help="exact LP relaxation value")
    _add_grid_options(p)
    p.add_argument("--family", choices=("full", "restricted"), default="full")
    p.add_argument("--dual", action="store_true", help="also print an optimal weighting")
    p.set_defaults(func=cmd_phi)

    p = command("cov", help="minimum k-cover by branch-and-bound")
    _add_grid_options(p)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--family", choices=("full", "restricted"), default="full")
    p.add_argument("--warm-start", choices=("wide", "biregular", "threehalves", "standard"))
    p.add_argument("-t", type=int, help="parameter for the standard warm start")
    p.add_argument("--budget", type=float, help="seconds (default 60 or $GRIDCOVER_BUDGET_SECS)")
    p.add_argument("--nodes", type=int, default=10**6, help="node limit")
    p.add_argument("-o", "--output", help="write the optimal cover here")
    p.set_defaults(func=cmd_cov)

    p = command("construct", help="build an explicit k-cover")
    p.add_argument("kind", choices=("wide", "biregular", "threehalves", "standard"))
    p.add_argument("n", type=int, nargs="?", help="n for the standard grid")
    _add_grid_options(p, required=False)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-t", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    p = command("certify", help="build and verify a dual weighting")
    p.add_argument("kind", choices=("generic", "square-claim", "delta", "standard", "restricted"))
    p.add_argument("n", type=int, nargs="?", help="n for standard-grid certificates")
    _add_grid_options(p, required=False)
    p.add_argument("-t", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--audit-full", action="store_true", help="check against every line and group violators by slope")
    p.add_argument("-o", "--output", help="write the weighting as JSON")
    p.set_defaults(func=cmd_certify)

    p = command("delta", help="genericity parameter of a grid")
    _add_grid_options(p)
    p.set_defaults(func=cmd_delta)

    p = command("bounds", help="reference lower and upper bounds")
    _add_grid_options(p)
    p.add_argument("-k", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = command("experiment", help="run canned experiments")
    p.add_argument("id", help="E1..E6 or all")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--budget", type=float, help="per-cell seconds")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, GridCoverError, ValueError) as exc:
        print(f"gridcover: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
