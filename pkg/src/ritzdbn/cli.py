"""Command-line front end: ``ritzdbn solve`` and ``ritzdbn table``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import linear
from .adaptive import adbn_solve
from .baselines import afem_solve, bfgs_solve, fem_solve
from .dbn import dbn_solve, uniform_breakpoints
from .errors import RitzError
from .experiments import HEADERS, TABLE_IDS, run_table
from .metrics import relative_h1_error
from .model import ShallowModel, SolverConfig
from .plot import render_svg
from .problems import make_problem
from .report import RunReport, atomic_write, csv_text

METHODS = ("dbn", "adbn", "fem", "afem", "bfgs", "linear-only", "kkt")
EXIT_USAGE, EXIT_SOLVER = 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ritzdbn", description="Shallow ReLU Ritz solver for 1D diffusion.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="run one solver on a catalog problem")
    s.add_argument("--problem", required=True,
                   help="exp_solution | x_two_thirds | interface | manufactured")
    s.add_argument("--k", type=float, help="contrast for the interface problem")
    s.add_argument("--name", help="manufactured problem name")
    s.add_argument("--method", choices=METHODS, default="dbn")
    s.add_argument("--n", type=int, default=21, help="neurons (counting b_0) or FEM elements")
    s.add_argument("--n0", type=int, default=10, help="initial size for adbn / afem")
    s.add_argument("--iters", type=int, default=1000)
    s.add_argument("--gamma", type=float, default=1e4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--refinements", type=int, help="cap on adaptive refinements")
    s.add_argument("--epsilon", type=float, default=1e-2)
    s.add_argument("--tau", type=float, default=1e-5)
    s.add_argument("--early-stop", action="store_true",
                   help="dbn: stop once the relative residual stalls")
    s.add_argument("--out", help="report JSON path")
    s.add_argument("--csv", help="per-iteration CSV path")
    s.add_argument("--svg", help="SVG plot path")

    t = sub.add_parser("table", help="reproduce one of the comparison tables as CSV")
    t.add_argument("--id", type=int, required=True, choices=TABLE_IDS)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--iters", type=int, help="override the iteration budget")
    t.add_argument("--out", help="CSV path (default: stdout)")
    t.add_argument("--no-timing", action="store_true",
                   help="leave wall_s blank so output is byte-reproducible")
    return parser


def _fixed_report(problem, method, config, model):
    rep = RunReport(problem=problem.tag, method=method, config=config.to_dict(), seed=config.seed)
    e = relative_h1_error(model, problem) if problem.has_exact else None
    rep.iterations.append({"k": 0, "J": None, "e_n": e, "xi": None, "ms": None})
    rep.model = model.to_dict()
    return rep


def run_solve(args) -> tuple[ShallowModel, RunReport]:
    problem = make_problem(args.problem, k=args.k, name=args.name)
    config = SolverConfig(gamma=args.gamma, max_iters=args.iters, seed=args.seed,
                          epsilon=args.epsilon, tau=args.tau)
    method = args.method
    if method == "dbn":
        return dbn_solve(problem, config, neurons=args.n, early_stop=args.early_stop)
    if method == "adbn":
        return adbn_solve(problem, config, args.n0, args.refinements)
    if method == "afem":
        refinements = 16 if args.refinements is None else args.refinements
        sol, rep = afem_solve(problem, args.n0, args.epsilon, refinements)
        return sol.to_model(), rep
    if method == "fem":
        import numpy as np

        model = fem_solve(problem, np.linspace(0.0, 1.0, args.n + 1)).to_model()
        return model, _fixed_report(problem, method, config, model)
    b0 = uniform_breakpoints(args.n)
    if method == "kkt":
        c, _ = linear.solve_coefficients_kkt(b0, problem, config.quad_order)
        model = ShallowModel(problem.alpha, b0, c)
        return model, _fixed_report(problem, method, config, model)
    model0 = ShallowModel(problem.alpha, b0, linear.solve_coefficients(b0, problem, config))
    if method == "linear-only":
        return model0, _fixed_report(problem, method, config, model0)
    return bfgs_solve(problem, config, model0)


def cmd_solve(args) -> int:
    try:
        make_problem(args.problem, k=args.k, name=args.name)
    except (RitzError, ValueError) as exc:
        print(f"ritzdbn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        SolverConfig(gamma=args.gamma, max_iters=args.iters, seed=args.seed,
                     epsilon=args.epsilon, tau=args.tau)
    except ValueError as exc:
        print(f"ritzdbn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        model, report = run_solve(args)
    except (RitzError, ValueError, FloatingPointError) as exc:
        print(f"ritzdbn: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if args.out:
        report.save(args.out)
    if args.csv:
        atomic_write(args.csv, report.iterations_csv())
    if args.svg:
        atomic_write(args.svg, render_svg(model, make_problem(args.problem, k=args.k,
                                                              name=args.name)))
    e_n = report.final("e_n")
    summary = f"{report.problem} {report.method}: n={model.n}"
    if e_n is not None:
        summary += f" e_n={e_n:.6g}"
    if report.refinements:
        summary += f" refinements={len(report.refinements)}"
    print(summary)
    return 0


def cmd_table(args) -> int:
    try:
        rows = run_table(args.id, seed=args.seed, iters=args.iters)
    except RitzError as exc:
        print(f"ritzdbn: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if args.no_timing:
        rows = [row[:-1] + [None] for row in rows]
    text = csv_text(HEADERS[args.id], rows)
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "solve":
        return cmd_solve(args)
    return cmd_table(args)


if __name__ == "__main__":
    sys.exit(main())
