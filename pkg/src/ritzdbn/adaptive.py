"""Flux-recovery error indicators, average marking and adaptive neuron enhancement."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from . import linear
from .dbn import dbn_solve, uniform_breakpoints
from .errors import ZeroDenominator
from .model import ProblemSpec, ShallowModel, SolverConfig
from .quadrature import partition_integrals
from .report import RunReport

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndicatorSet:
    xi_k: np.ndarray
    xi: float


def _element_fluxes(model: ShallowModel, problem: ProblemSpec, order: int):
    h = np.diff(model.knots)
    s = linear.element_integrals_of_a(model.knots, problem, order)
    return h, s * model.slopes / h


def recover_flux(model: ShallowModel, problem: ProblemSpec, order: int = 8,
                 method: str = "average") -> np.ndarray:
    """Nodal values of the recovered continuous flux at all n + 2 knots.

    ``average`` weights the two adjacent element means by the opposite
    element width; ``l2`` is the L2 projection of the element means onto
    continuous piecewise linears (one tridiagonal solve).
    """
    h, q = _element_fluxes(model, problem, order)
    if method == "average":
        inner = (h[:-1] * q[1:] + h[1:] * q[:-1]) / (h[:-1] + h[1:])
        return np.concatenate([q[:1], inner, q[-1:]])
    if method == "l2":
        size = h.size + 1
        bands = np.zeros((3, size))
        bands[1, :-1] += h / 3.0
        bands[1, 1:] += h / 3.0
        bands[0, 1:] = h / 6.0
        bands[2, :-1] = h / 6.0
        rhs = np.zeros(size)
        rhs[:-1] += 0.5 * q * h
        rhs[1:] += 0.5 * q * h
        return solve_banded((1, 1), bands, rhs)
    raise ValueError(f"unknown recovery method {method!r}")


def local_indicators(model: ShallowModel, problem: ProblemSpec, order: int = 8,
                     method: str = "average") -> IndicatorSet:
    knots = model.knots
    G = recover_flux(model, problem, order, method)
    slopes = model.slopes
    h = np.diff(knots)

    def integrand(x, k):
        t = (x - knots[k]) / h[k]
        rec = G[k] + t * (G[k + 1] - G[k])
        a = problem.a(x)
        return (rec - a * slopes[k]) ** 2 / a

    sq = partition_integrals(integrand, knots, order, breaks=problem.kinks)
    xi_k = np.sqrt(np.maximum(sq, 0.0))
    norm = math.sqrt(float(np.dot(slopes * slopes, h)))
    if norm == 0.0:
        raise ZeroDenominator("network is constant; relative estimator undefined")
    return IndicatorSet(xi_k=xi_k, xi=math.sqrt(float(np.sum(sq))) / norm)


def mark(indicators: IndicatorSet) -> set:
    """Average marking: elements whose indicator reaches the mean (0-based)."""
    xi_k = np.asarray(indicators.xi_k)
    return set(np.flatnonzero(xi_k >= xi_k.mean()).tolist())


def refine_points(knots, marked, problem: ProblemSpec) -> np.ndarray:
    """One new point per marked element: the midpoint, or an interior interface point."""
    new = []
    for e in sorted(marked):
        lo, hi = knots[e], knots[e + 1]
        inside = [p for p in problem.kinks if lo + 1e-12 < p < hi - 1e-12]
        new.append(inside[0] if inside else 0.5 * (lo + hi))
    return np.asarray(new, dtype=float)


def _error_or_none(model, problem):
    from .metrics import relative_h1_error

    return relative_h1_error(model, problem) if problem.has_exact else None


def adbn_solve(problem: ProblemSpec, config: SolverConfig, n0: int,
               max_refinements: int | None = None,
               recovery: str = "average") -> tuple[ShallowModel, RunReport]:
    """Adaptive dBN starting from ``n0`` uniform neurons (counting b_0 = 0).

    Each stage runs dBN until the relative residual stalls, then refines the
    elements marked by the estimator. Stops when the estimator reaches
    ``config.epsilon``, after ``max_refinements`` refinements, or before the
    network would exceed ``config.n_max`` breakpoints.
    """
    if n0 < 1:
        raise ValueError("n0 must be >= 1")
    rng = np.random.default_rng(config.seed)
    report = RunReport(problem=problem.tag, method="adbn", config=config.to_dict(),
                       seed=config.seed)
    b = uniform_breakpoints(n0)
    stage = 0
    while True:
        model, _ = dbn_solve(problem, config, b, early_stop=True, rng=rng, report=report,
                             record_error=False)
        ind = local_indicators(model, problem, config.quad_order, recovery)
        e_n = _error_or_none(model, problem)
        report.refinements.append({"stage": stage, "n": model.n, "neurons": model.n + 1,
                                   "e_n": e_n, "xi": ind.xi,
                                   "iterations": len(report.iterations)})
        if report.iterations:
            report.iterations[-1]["xi"] = ind.xi
            report.iterations[-1]["e_n"] = e_n
        if ind.xi <= config.epsilon:
            break
        if max_refinements is not None and stage >= max_refinements:
            break
        new = refine_points(model.knots, mark(ind), problem)
        if model.n + new.size > config.n_max:
            log.warning("refinement to %d breakpoints exceeds n_max=%d; stopping",
                        model.n + new.size, config.n_max)
            report.refinements[-1]["stopped"] = "n_max"
            break
        b = np.union1d(model.b, new)
        stage += 1
    report.model = model.to_dict()
    return model, report
