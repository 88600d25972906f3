"""Experiment sweeps behind the ``table`` command.

Each table is a list of independent jobs. A job is a plain tuple so it can
be shipped to a worker process; results come back as CSV rows in job order.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor

from . import linear
from .adaptive import adbn_solve, local_indicators
from .baselines import afem_solve
from .dbn import dbn_solve, uniform_breakpoints
from .errors import DomainError
from .metrics import fit_rate, relative_h1_error
from .model import ShallowModel, SolverConfig
from .problems import make_problem

TABLE_IDS = (1, 2, 3, 4)

HEADERS = {
    1: ("n", "e_n", "r", "seed", "wall_s"),
    2: ("method", "n", "e_n", "xi", "r", "seed", "wall_s"),
    3: ("method", "n", "e_n", "xi", "r", "seed", "wall_s"),
    4: ("k", "e_n_initial", "e_n_dbn", "seed", "wall_s"),
}

TABLE1_NS = tuple(range(60, 331, 30))
TABLE4_KS = tuple(10.0**p for p in range(1, 9))


def _rate(n, e):
    try:
        return fit_rate(n, e)
    except DomainError:
        return math.nan


def _dbn_row(tag, neurons, iters, seed, gamma=1e4, k=None):
    problem = make_problem(tag, k=k)
    model, _ = dbn_solve(problem, SolverConfig(gamma=gamma, max_iters=iters, seed=seed),
                         neurons=neurons, record_error=False)
    return model, problem


def _job(job):
    kind, args, seed = job
    t0 = time.perf_counter()
    if kind == "t1":
        (n, iters) = args
        model, problem = _dbn_row("exp_solution", n, iters, seed)
        e = relative_h1_error(model, problem)
        rows = [[n, e, _rate(n, e), seed]]
    elif kind == "fixed":
        (tag, label, n, iters) = args
        model, problem = _dbn_row(tag, n, iters, seed)
        e = relative_h1_error(model, problem)
        xi = local_indicators(model, problem).xi
        rows = [[f"{label}({n})", n, e, xi, _rate(n, e), seed]]
    elif kind == "adaptive":
        (tag, label, n0, refinements, epsilon) = args
        problem = make_problem(tag)
        cfg = SolverConfig(seed=seed, epsilon=epsilon)
        _, rep = adbn_solve(problem, cfg, n0, refinements)
        rows = [[f"{label}({r['neurons']})", r["neurons"], r["e_n"], r["xi"],
                 _rate(r["neurons"], r["e_n"]), seed] for r in rep.refinements]
    elif kind == "afem":
        (n0, refinements) = args
        _, rep = afem_solve(make_problem("x_two_thirds"), n0, 1e-2, refinements)
        rows = [[f"aFEM({r['elements']})", r["elements"], r["e_n"], r["xi"],
                 _rate(r["elements"], r["e_n"]), seed] for r in rep.refinements]
    elif kind == "t4":
        (k, iters) = args
        problem = make_problem("interface", k=k)
        cfg = SolverConfig(gamma=1e11, max_iters=iters, seed=seed)
        b0 = uniform_breakpoints(15)
        initial = ShallowModel(problem.alpha, b0, linear.solve_coefficients(b0, problem, cfg))
        model, _ = dbn_solve(problem, cfg, b0, record_error=False)
        rows = [[k, relative_h1_error(initial, problem), relative_h1_error(model, problem), seed]]
    else:
        raise ValueError(kind)
    wall = time.perf_counter() - t0
    return [row + [wall] for row in rows]


def table_jobs(table_id: int, seed: int, iters: int | None = None) -> list:
    if table_id == 1:
        return [("t1", (n, iters or 1000), seed) for n in TABLE1_NS]
    if table_id == 2:
        return [("adaptive", ("exp_solution", "Adaptive", 20, None, 1e-2), seed),
                ("fixed", ("exp_solution", "Fixed", 137, iters or 1000), seed),
                ("fixed", ("exp_solution", "Fixed", 222, iters or 1000), seed)]
    if table_id == 3:
        return ([("fixed", ("x_two_thirds", "dBN", n, iters or 250), seed) for n in (10, 14, 19, 24)]
                + [("adaptive", ("x_two_thirds", "AdBN", 10, 3, 1e-2), seed),
                   ("afem", (10, 16), seed)])
    if table_id == 4:
        return [("t4", (k, iters or 500), seed) for k in TABLE4_KS]
    raise ValueError(f"unknown table id {table_id}")


def worker_count(jobs: int) -> int:
    cap = os.environ.get("RITZ_DBN_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(limit, jobs))


def run_table(table_id: int, seed: int = 0, iters: int | None = None) -> list[list]:
    """All CSV rows of a table, in a fixed order independent of scheduling."""
    jobs = table_jobs(table_id, seed, iters)
    workers = worker_count(len(jobs))
    if workers == 1:
        chunks = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_job, jobs))
    return [row for chunk in chunks for row in chunk]
