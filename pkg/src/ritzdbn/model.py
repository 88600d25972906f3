"""Problem, network and configuration types; network evaluation and energy."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import linear
from .quadrature import gauss_legendre

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProblemSpec:
    """Two-point problem -(a u')' = f on (0, 1), u(0) = alpha, u(1) = beta.

    All callables must accept numpy arrays. ``A1``, ``F`` and ``FF`` are
    optional closed-form antiderivatives of ``a``, ``f`` and ``F``; when
    present they replace quadrature. ``kinks`` lists points where ``a`` is
    not differentiable (physical interfaces), ``jumps`` points where ``f``
    is discontinuous and ``singular`` points where ``f`` or ``u'`` blow up.
    """

    a: Fn
    a_prime: Fn
    f: Fn
    alpha: float
    beta: float
    A1: Optional[Fn] = None
    F: Optional[Fn] = None
    FF: Optional[Fn] = None
    kinks: tuple = ()
    jumps: tuple = ()
    singular: tuple = ()
    u: Optional[Fn] = None
    du: Optional[Fn] = None
    tag: str = "custom"

    def __post_init__(self):
        for name in ("kinks", "jumps", "singular"):
            pts = tuple(float(p) for p in getattr(self, name))
            if list(pts) != sorted(pts):
                raise ValueError(f"{name} must be sorted")
            object.__setattr__(self, name, pts)
        if any(not 0.0 < p < 1.0 for p in self.kinks):
            raise ValueError("non-differentiability points must lie in (0, 1)")
        xg, _ = gauss_legendre(8)
        edges = np.linspace(0.0, 1.0, 33)
        nodes = (0.5 * (edges[1:] + edges[:-1])[:, None]
                 + 0.5 * np.diff(edges)[:, None] * xg).ravel()
        if np.min(self.a(nodes)) <= 0.0:
            raise ValueError("diffusion coefficient must be positive")

    @property
    def breaks(self) -> tuple:
        return tuple(sorted(set(self.kinks) | set(self.jumps)))

    @property
    def has_exact(self) -> bool:
        return self.u is not None and self.du is not None

    def is_kink(self, x, tol: float = 1e-12):
        x = np.asarray(x, dtype=float)
        hit = np.zeros(x.shape, dtype=bool)
        for p in self.kinks:
            hit |= np.abs(x - p) <= tol
        return hit


@dataclass(frozen=True, eq=False)
class ShallowModel:
    """u(x) = alpha + sum_i c[i] * relu(x - knot_i), knot_0 = 0, knot_i = b[i-1]."""

    alpha: float
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        b = np.array(self.b, dtype=float).ravel()
        c = np.array(self.c, dtype=float).ravel()
        if c.size != b.size + 1:
            raise ValueError("need len(c) == len(b) + 1")
        if b.size and (b[0] <= 0.0 or b[-1] >= 1.0 or np.any(np.diff(b) <= 0.0)):
            raise ValueError("breakpoints must be strictly increasing inside (0, 1)")
        b.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def __eq__(self, other):
        if not isinstance(other, ShallowModel):
            return NotImplemented
        return (self.alpha == other.alpha and np.array_equal(self.b, other.b)
                and np.array_equal(self.c, other.c))

    @property
    def n(self) -> int:
        return self.b.size

    @property
    def knots(self) -> np.ndarray:
        """Breakpoints with both sentinels, 0 = b_0 < ... < b_{n+1} = 1."""
        return np.concatenate([[0.0], self.b, [1.0]])

    @property
    def slopes(self) -> np.ndarray:
        """Constant derivative on each of the n + 1 elements."""
        return np.cumsum(self.c)

    def nodal_values(self) -> np.ndarray:
        knots = self.knots
        return self.alpha + np.concatenate([[0.0], np.cumsum(self.slopes * np.diff(knots))])

    def end_value(self) -> float:
        return float(self.alpha + np.dot(self.c, 1.0 - self.knots[:-1]))

    def with_c(self, c) -> "ShallowModel":
        return ShallowModel(self.alpha, self.b, c)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "b": self.b.tolist(), "c": self.c.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ShallowModel":
        return cls(d["alpha"], d["b"], d["c"])

    @classmethod
    def from_nodal(cls, nodes, values) -> "ShallowModel":
        """Network equal to the piecewise-linear interpolant of (nodes, values)."""
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        slopes = np.diff(values) / np.diff(nodes)
        c = np.concatenate([[slopes[0]], np.diff(slopes)])
        return cls(values[0], nodes[1:-1], c)


@dataclass(frozen=True)
class SolverConfig:
    gamma: float = 1e4
    delta_c: float = 1e-4
    delta_g: float = 1e-4
    tau: float = 1e-5
    epsilon: float = 1e-2
    max_iters: int = 1000
    seed: int = 0
    quad_order: int = 8
    eta_max: float = 2.0
    n_max: int = 4096

    def __post_init__(self):
        for name in ("gamma", "delta_c", "delta_g", "tau", "epsilon", "eta_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.max_iters < 1 or self.quad_order < 1:
            raise ValueError("max_iters and quad_order must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(model: ShallowModel, x):
    """Network value at ``x`` (scalar or array in [0, 1])."""
    x = np.asarray(x, dtype=float)
    knots = model.knots
    j = np.clip(np.searchsorted(knots, x, side="right") - 1, 0, model.n)
    out = model.nodal_values()[j] + model.slopes[j] * (x - knots[j])
    return float(out) if out.ndim == 0 else out


def evaluate_derivative(model: ShallowModel, x):
    """Network slope at ``x``; the right limit is returned at a breakpoint."""
    x = np.asarray(x, dtype=float)
    j = np.searchsorted(model.b, x, side="right")
    out = model.slopes[j]
    return float(out) if out.ndim == 0 else out


def energy_terms(alpha, b, c, problem: ProblemSpec, gamma: float, order: int = 8) -> float:
    """Modified Ritz energy for sorted (not necessarily distinct) breakpoints.

    Used directly by line searches, where trial breakpoints may touch.
    """
    knots = np.concatenate([[0.0], b, [1.0]])
    s = linear.element_integrals_of_a(knots, problem, order)
    f_vec = linear.rhs_from_knots(knots, problem, order)
    slopes = np.cumsum(c)
    stiff = 0.5 * np.dot(slopes * slopes, s)
    load = np.dot(c, f_vec)
    if alpha != 0.0:
        load += alpha * linear.total_source(problem, order)
    end = alpha + np.dot(c, 1.0 - knots[:-1])
    return float(stiff - load + 0.5 * gamma * (end - problem.beta) ** 2)


def energy(model: ShallowModel, problem: ProblemSpec, config: SolverConfig) -> float:
    """J(u) = 1/2 int a u'^2 - int f u + gamma/2 (u(1) - beta)^2."""
    return energy_terms(model.alpha, model.b, model.c, problem, config.gamma, config.quad_order)
