"""Error norms, convergence rates and conditioning diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ZeroDenominator
from .linear import StiffnessData, apply_stiffness_inverse, stiffness_product
from .model import ProblemSpec, ShallowModel
from .quadrature import partition_integrals

ERROR_ORDER = 16
# e_n this close to 1 carries no usable rate information
RATE_MARGIN = 1e-12


@dataclass(frozen=True)
class ErrorReport:
    e_n: float
    r: float
    n: int


def _exact_seminorm_sq(problem: ProblemSpec, order: int) -> float:
    edges = np.linspace(0.0, 1.0, 65)
    pts = sorted(set(problem.breaks) | set(problem.singular))
    vals = partition_integrals(lambda x, k: problem.du(x) ** 2, edges, order, pts, problem.singular)
    return float(np.sum(vals))


def relative_h1_error(model: ShallowModel, problem: ProblemSpec, order: int = ERROR_ORDER) -> float:
    """|u - u_n|_{H^1} / |u|_{H^1}, integrated element by element."""
    if not problem.has_exact:
        raise ValueError("problem has no exact solution")
    denom = _exact_seminorm_sq(problem, order)
    if denom == 0.0:
        raise ZeroDenominator("exact solution has zero H1 seminorm")
    slopes = model.slopes
    pts = sorted(set(problem.breaks) | set(problem.singular))
    num = partition_integrals(lambda x, k: (problem.du(x) - slopes[k]) ** 2,
                              model.knots, order, pts, problem.singular)
    return math.sqrt(max(float(np.sum(num)), 0.0) / denom)


def fit_rate(n: int, e_n: float) -> float:
    """r such that e_n = (1/n)^r."""
    if n < 2:
        raise DomainError("rate needs n >= 2")
    if not 0.0 < e_n < 1.0 - RATE_MARGIN:
        raise DomainError("rate needs 0 < e_n < 1")
    r = -math.log(e_n) / math.log(n)
    if not r > 0.0 or not math.isfinite(r):
        raise DomainError("e_n too close to 1 for a meaningful rate")
    return r


def error_report(model: ShallowModel, problem: ProblemSpec) -> ErrorReport:
    e = relative_h1_error(model, problem)
    r = fit_rate(model.n, e) if model.n >= 2 and 0.0 < e < 1.0 - RATE_MARGIN else float("nan")
    return ErrorReport(e_n=e, r=r, n=model.n)


def _power(apply, size, iters, tol, seed=0):
    v = np.random.default_rng(seed).standard_normal(size)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = apply(v)
        new = float(np.dot(v, w))
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(new - lam) <= tol * abs(new):
            return new
        lam = new
    return lam


def condition_number(data: StiffnessData, iters: int = 200, tol: float = 1e-6) -> float:
    """Spectral condition number of A(b) from power iterations on A and A^{-1}.

    Both products are O(n); A is never formed.
    """
    if data.size == 1:
        return 1.0
    lam_max = _power(lambda v: stiffness_product(data, v), data.size, iters, tol)
    inv_max = _power(lambda v: apply_stiffness_inverse(data, v), data.size, iters, tol)
    return lam_max * inv_max
