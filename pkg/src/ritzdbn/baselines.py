"""Reference solvers: P1 finite elements, adaptive FEM and full-parameter BFGS."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import minimize

from . import linear
from .adaptive import local_indicators, mark
from .dbn import canonical_breakpoints, gradient_b, gradient_c
from .errors import NonPositiveCoefficient
from .model import ProblemSpec, ShallowModel, SolverConfig, energy_terms
from .report import RunReport

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FemSolution:
    nodes: np.ndarray
    values: np.ndarray

    def to_model(self) -> ShallowModel:
        return ShallowModel.from_nodal(self.nodes, self.values)


def fem_solve(problem: ProblemSpec, nodes, order: int = 8) -> FemSolution:
    """Galerkin P1 solution with both Dirichlet values imposed strongly."""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size < 2 or nodes[0] != 0.0 or nodes[-1] != 1.0 or np.any(np.diff(nodes) <= 0):
        raise ValueError("nodes must be strictly increasing from 0 to 1")
    h = np.diff(nodes)
    s = linear.element_integrals_of_a(nodes, problem, order)
    if np.any(s <= 0.0):
        raise NonPositiveCoefficient("element integral of a(x) is not positive")
    kappa = s / h**2
    values = np.empty(nodes.size)
    values[0], values[-1] = problem.alpha, problem.beta
    m = nodes.size - 2
    if m == 0:
        return FemSolution(nodes, values)

    # load against hat functions as second differences of the ramp moments
    ramp = linear.rhs_from_knots(nodes, problem, order)
    ramp = np.append(ramp, 0.0)
    load = ramp[:-2] / h[:-1] - ramp[1:-1] * (1.0 / h[:-1] + 1.0 / h[1:]) + ramp[2:] / h[1:]
    load[0] += kappa[0] * problem.alpha
    load[-1] += kappa[-1] * problem.beta

    bands = np.zeros((3, m))
    bands[0, 1:] = -kappa[1:-1]
    bands[1] = kappa[:-1] + kappa[1:]
    bands[2, :-1] = -kappa[1:-1]
    values[1:-1] = solve_banded((1, 1), bands, load)
    return FemSolution(nodes, values)


def afem_solve(problem: ProblemSpec, n0: int, epsilon: float = 1e-2,
               max_refinements: int = 16, order: int = 8) -> tuple[FemSolution, RunReport]:
    """Adaptive P1 FEM from ``n0`` uniform elements with average marking and bisection."""
    from .metrics import relative_h1_error

    if n0 < 2:
        raise ValueError("n0 must be >= 2")
    report = RunReport(problem=problem.tag, method="afem",
                       config={"n0": n0, "epsilon": epsilon, "max_refinements": max_refinements,
                               "quad_order": order})
    nodes = np.linspace(0.0, 1.0, n0 + 1)
    for stage in range(max_refinements + 1):
        t0 = time.perf_counter()
        sol = fem_solve(problem, nodes, order)
        model = sol.to_model()
        ind = local_indicators(model, problem, order)
        e_n = relative_h1_error(model, problem) if problem.has_exact else None
        report.refinements.append({"stage": stage, "n": model.n, "elements": model.n + 1,
                                   "e_n": e_n, "xi": ind.xi,
                                   "ms": 1e3 * (time.perf_counter() - t0)})
        if ind.xi <= epsilon or stage == max_refinements:
            break
        marked = sorted(mark(ind))
        mids = 0.5 * (nodes[marked] + nodes[np.asarray(marked) + 1])
        nodes = np.union1d(nodes, mids)
    report.model = model.to_dict()
    return sol, report


class _Objective:
    """Energy and gradient over the packed vector (c, b), canonicalised by sorting."""

    def __init__(self, problem, config, n, freeze_b):
        self.problem, self.config, self.n = problem, config, n
        self.freeze_b = freeze_b
        self.evals = 0

    def model(self, x) -> tuple[ShallowModel, np.ndarray]:
        c, b = x[: self.n + 1], x[self.n + 1:]
        order = np.argsort(b, kind="stable")
        b_sorted = canonical_breakpoints(b[order])
        cs = np.concatenate([c[:1], c[1:][order]])
        return ShallowModel(self.problem.alpha, b_sorted, cs), order

    def __call__(self, x):
        self.evals += 1
        model, order = self.model(x)
        cfg = self.config
        j = energy_terms(model.alpha, model.b, model.c, self.problem, cfg.gamma, cfg.quad_order)
        gc_sorted = gradient_c(model, self.problem, cfg)
        gc = np.empty_like(gc_sorted)
        gc[0] = gc_sorted[0]
        gc[1:][order] = gc_sorted[1:]
        gb = np.zeros(self.n)
        if not self.freeze_b:
            gb[order] = gradient_b(model, self.problem, cfg)
        return j, np.concatenate([gc, gb])


def bfgs_solve(problem: ProblemSpec, config: SolverConfig, model0: ShallowModel,
               max_iters: int | None = None, freeze_b: bool = False,
               gtol: float = 1e-8) -> tuple[ShallowModel, RunReport]:
    """Full-memory BFGS on all network parameters with a Wolfe line search.

    The breakpoints in the optimiser state may leave their order; they are
    sorted only when the energy and gradient are evaluated. ``freeze_b``
    masks the breakpoint gradient so only the coefficients move.
    """
    from .metrics import relative_h1_error

    max_iters = config.max_iters if max_iters is None else max_iters
    report = RunReport(problem=problem.tag, method="bfgs", config=config.to_dict(),
                       seed=config.seed)
    obj = _Objective(problem, config, model0.n, freeze_b)
    x0 = np.concatenate([model0.c, model0.b])
    track = problem.has_exact
    clock = [time.perf_counter()]

    def record(x, j):
        model, _ = obj.model(x)
        now = time.perf_counter()
        report.iterations.append({
            "k": len(report.iterations), "J": j,
            "e_n": relative_h1_error(model, problem) if track else None,
            "xi": None, "ms": 1e3 * (now - clock[0]),
        })
        clock[0] = now

    record(x0, obj(x0)[0])

    def callback(intermediate_result):
        record(intermediate_result.x, float(intermediate_result.fun))

    res = minimize(obj, x0, jac=True, method="BFGS", callback=callback,
                   options={"maxiter": max_iters, "gtol": gtol, "c1": 1e-4, "c2": 0.9})
    if not res.success and res.status != 1:
        # line search failure: keep the best iterate found
        log.info("BFGS stopped: %s", res.message)
    final, _ = obj.model(res.x)
    report.model = final.to_dict()
    report.config = {**report.config, "status": int(res.status), "message": str(res.message)}
    return final, report
