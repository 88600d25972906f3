"""Stiffness data, right-hand side and O(n) solves for the linear coefficients.

The stiffness matrix A(b) of the ReLU basis is dense, but its inverse is
tridiagonal with entries built from the element integrals s_i of ``a``. Only
``s`` and the boundary vector ``d`` are ever stored on the solver path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DegenerateConstraint, DegenerateRankOne, NonPositiveCoefficient
from .quadrature import integrate_split, partition_integrals

if TYPE_CHECKING:
    from .model import ProblemSpec, SolverConfig

H_MIN = 1e-12


@dataclass(frozen=True, eq=False)
class StiffnessData:
    """s[i] = integral of a over element i; d[i] = 1 - knot_i."""

    s: np.ndarray
    d: np.ndarray

    @property
    def size(self) -> int:
        return self.s.size


def _knots(b) -> np.ndarray:
    return np.concatenate([[0.0], np.asarray(b, dtype=float), [1.0]])


def element_integrals_of_a(knots, problem: "ProblemSpec", order: int = 8) -> np.ndarray:
    if problem.A1 is not None:
        return np.diff(problem.A1(knots))
    return partition_integrals(lambda x, k: problem.a(x), knots, order, breaks=problem.kinks)


def rhs_from_knots(knots, problem: "ProblemSpec", order: int = 8) -> np.ndarray:
    """f_i = integral over [knot_i, 1] of f(x) (x - knot_i), i = 0..n."""
    t = np.asarray(knots[:-1], dtype=float)
    if problem.F is not None and problem.FF is not None:
        return problem.F(1.0) * (1.0 - t) - (problem.FF(1.0) - problem.FF(t))
    m0 = partition_integrals(lambda x, k: problem.f(x), knots, order,
                             problem.breaks, problem.singular)
    m1 = partition_integrals(lambda x, k: x * problem.f(x), knots, order,
                             problem.breaks, problem.singular)
    tail0 = np.cumsum(m0[::-1])[::-1]
    tail1 = np.cumsum(m1[::-1])[::-1]
    return tail1 - t * tail0


def total_source(problem: "ProblemSpec", order: int = 8) -> float:
    """Integral of f over [0, 1]."""
    if problem.F is not None:
        with np.errstate(all="ignore"):
            val = float(problem.F(1.0) - problem.F(0.0))
        if np.isfinite(val):
            return val
    return integrate_split(problem.f, 0.0, 1.0, order, problem.breaks, problem.singular)


def assemble_stiffness(b, problem: "ProblemSpec", order: int = 8) -> StiffnessData:
    knots = _knots(b)
    if np.min(np.diff(knots)) < H_MIN:
        raise NonPositiveCoefficient("breakpoints closer than 1e-12 (collapsed element)")
    s = element_integrals_of_a(knots, problem, order)
    if np.any(s <= 0.0):
        raise NonPositiveCoefficient("element integral of a(x) is not positive")
    return StiffnessData(s=s, d=1.0 - knots[:-1])


def assemble_rhs(b, problem: "ProblemSpec", order: int = 8) -> np.ndarray:
    return rhs_from_knots(_knots(b), problem, order)


def apply_stiffness_inverse(data: StiffnessData, v) -> np.ndarray:
    """A(b)^{-1} v using the explicit tridiagonal inverse; O(n), no factorisation."""
    s = data.s
    if np.any(s <= 0.0):
        raise NonPositiveCoefficient("element integral of a(x) is not positive")
    v = np.asarray(v, dtype=float)
    if v.shape[0] != s.size:
        raise ValueError("vector length must be n + 1")
    scale = s if v.ndim == 1 else s[:, None]
    t = (v[:-1] - v[1:]) / scale[:-1]
    out = np.zeros_like(v)
    out[:-1] += t
    out[1:] -= t
    out[-1] += v[-1] / scale[-1]
    return out


def stiffness_product(data: StiffnessData, c) -> np.ndarray:
    """A(b) c in O(n): A_ij = integral of a over [knot_max(i,j), 1]."""
    c = np.asarray(c, dtype=float)
    tail = np.cumsum(data.s[::-1])[::-1]
    head = np.cumsum(c)
    rest = np.cumsum((c * tail)[::-1])[::-1]
    return tail * head + np.concatenate([rest[1:], [0.0]])


def dense_stiffness(data: StiffnessData) -> np.ndarray:
    """Explicit A(b); diagnostics and test oracles only."""
    tail = np.cumsum(data.s[::-1])[::-1]
    idx = np.arange(data.size)
    return tail[np.maximum.outer(idx, idx)]


def _penalised_solve(data, f_vec, alpha, beta, gamma):
    w = apply_stiffness_inverse(data, data.d)
    y = apply_stiffness_inverse(data, f_vec)
    denom = 1.0 + gamma * np.dot(data.d, w)
    if not denom > 0.0:
        raise DegenerateRankOne("1 + gamma d^T A^{-1} d is not positive")
    # Sherman-Morrison, rearranged so gamma*(beta - alpha) never enters y
    corr = w * (gamma * ((beta - alpha) - np.dot(data.d, y)) / denom)
    return y + corr, np.abs(y) + np.abs(corr)


def _check_residual(data, c, size, f_vec, alpha, beta, gamma):
    jump = np.dot(data.d, c) - (beta - alpha)
    res = stiffness_product(data, c) - f_vec + gamma * jump * data.d
    rhs = f_vec + gamma * (beta - alpha) * data.d
    # rounding floor: cancellation in y + corr is amplified by gamma d d^T
    floor = 64 * np.finfo(float).eps * (1.0 + gamma) * np.dot(data.d, size)
    tol = 1e-8 * (1.0 + np.max(np.abs(rhs))) + floor
    if np.max(np.abs(res)) > tol:
        raise DegenerateRankOne(f"linear solve residual {np.max(np.abs(res)):.3e} exceeds {tol:.3e}")


def solve_coefficients(b, problem: "ProblemSpec", config: "SolverConfig") -> np.ndarray:
    """c = (A + gamma d d^T)^{-1} (f + gamma (beta - alpha) d)."""
    data = assemble_stiffness(b, problem, config.quad_order)
    f_vec = assemble_rhs(b, problem, config.quad_order)
    c, size = _penalised_solve(data, f_vec, problem.alpha, problem.beta, config.gamma)
    if __debug__:
        _check_residual(data, c, size, f_vec, problem.alpha, problem.beta, config.gamma)
    return c


def solve_coefficients_kkt(b, problem: "ProblemSpec", order: int = 8) -> tuple[np.ndarray, float]:
    """Exact enforcement of u(1) = beta through the bordered system [[A, d], [d^T, 0]]."""
    data = assemble_stiffness(b, problem, order)
    f_vec = assemble_rhs(b, problem, order)
    w = apply_stiffness_inverse(data, data.d)
    schur = np.dot(data.d, w)
    if schur == 0.0:
        raise DegenerateConstraint("d^T A^{-1} d vanishes")
    y = apply_stiffness_inverse(data, f_vec)
    lam = (np.dot(data.d, y) - (problem.beta - problem.alpha)) / schur
    return y - lam * w, float(lam)
