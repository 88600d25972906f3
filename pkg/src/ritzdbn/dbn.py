"""Damped block Newton iteration for the breakpoints of a shallow Ritz network.

Each iteration solves exactly for the linear coefficients, then takes one
damped Newton step on the reduced system for the breakpoints. The Hessian
with respect to the breakpoints is diagonal plus a rank-one penalty term, so
the Newton direction costs O(n).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import linear
from .errors import SingularReducedHessian
from .model import ProblemSpec, ShallowModel, SolverConfig, energy_terms
from .quadrature import integrate_f_tail
from .report import RunReport

log = logging.getLogger(__name__)

EDGE_EPS = 1e-12
NUDGE = 1e-10
ZETA_MIN = 1e-12
GOLDEN_ITERS = 40
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class NeuronClassification:
    """Index sets use 1-based neuron numbers j = 1..n (j-1 indexes ``g``)."""

    s1: set
    s2: set
    g: np.ndarray
    gprime: np.ndarray

    @property
    def fixed(self) -> set:
        return self.s1 | self.s2


@dataclass
class DbnState:
    model: ShallowModel
    iteration: int = 0
    energy: float = math.inf
    relative_residual: float = math.inf
    rng: np.random.Generator = field(default_factory=np.random.default_rng)


def uniform_breakpoints(neurons: int) -> np.ndarray:
    """Interior breakpoints of a uniform net with ``neurons`` breakpoints counting b_0 = 0."""
    if neurons < 1:
        raise ValueError("need at least one neuron")
    return np.arange(1, neurons) / neurons


def averaged_slopes(c) -> np.ndarray:
    """Mean of the one-sided slopes at each interior breakpoint."""
    c = np.asarray(c, dtype=float)
    return np.cumsum(c)[:-1] + 0.5 * c[1:]


def compute_g(model: ShallowModel, problem: ProblemSpec, order: int = 8) -> np.ndarray:
    """g_j = int_{b_j}^1 f - a(b_j) * (averaged slope at b_j), j = 1..n."""
    if model.n == 0:
        return np.zeros(0)
    tail = np.atleast_1d(integrate_f_tail(problem, model.b, order))
    return tail - problem.a(model.b) * averaged_slopes(model.c)


def _boundary_gap(model: ShallowModel, problem: ProblemSpec) -> float:
    return model.end_value() - problem.beta


def gradient_b(model: ShallowModel, problem: ProblemSpec, config: SolverConfig) -> np.ndarray:
    g = compute_g(model, problem, config.quad_order)
    return model.c[1:] * (g - config.gamma * _boundary_gap(model, problem))


def gradient_c(model: ShallowModel, problem: ProblemSpec, config: SolverConfig) -> np.ndarray:
    """(A + gamma d d^T) c - F, evaluated in O(n)."""
    data = linear.assemble_stiffness(model.b, problem, config.quad_order)
    f_vec = linear.assemble_rhs(model.b, problem, config.quad_order)
    gap = _boundary_gap(model, problem)
    return linear.stiffness_product(data, model.c) - f_vec + config.gamma * gap * data.d


def g_derivative(model: ShallowModel, problem: ProblemSpec) -> np.ndarray:
    """d g_j / d b_j = -f(b_j) - a'(b_j) * (averaged slope at b_j)."""
    if model.n == 0:
        return np.zeros(0)
    return -problem.f(model.b) - problem.a_prime(model.b) * averaged_slopes(model.c)


def hessian_b(model: ShallowModel, problem: ProblemSpec, config: SolverConfig) -> np.ndarray:
    """Dense D(c) (B + gamma 1 c^T); test oracle and diagnostics only."""
    cb = model.c[1:]
    gp = g_derivative(model, problem)
    return cb[:, None] * (np.diag(gp) + config.gamma * cb[None, :])


def classify(model: ShallowModel, problem: ProblemSpec, config: SolverConfig,
             g: np.ndarray | None = None) -> NeuronClassification:
    if g is None:
        g = compute_g(model, problem, config.quad_order)
    b, cb = model.b, model.c[1:]
    kink = problem.is_kink(b)
    with np.errstate(invalid="ignore"):
        gp = g_derivative(model, problem)
    gp = np.where(kink, np.nan, gp)
    small_c = np.abs(cb) < config.delta_c
    outside = (b <= 0.0) | (b >= 1.0)
    s1_mask = (small_c | outside) & ~kink
    s2_mask = kink | (~s1_mask & (np.abs(gp) < config.delta_g))
    return NeuronClassification(
        s1=set((np.flatnonzero(s1_mask) + 1).tolist()),
        s2=set((np.flatnonzero(s2_mask) + 1).tolist()),
        g=g, gprime=gp,
    )


def newton_direction(model: ShallowModel, problem: ProblemSpec, config: SolverConfig,
                     cls: NeuronClassification) -> np.ndarray:
    """Reduced Newton step -H_red^{-1} grad_red by Sherman-Morrison; zero on fixed neurons.

    Solves (B + gamma 1 c^T) p = gamma * gap * 1 - g on the free indices.
    """
    n = model.n
    p = np.zeros(n)
    free = np.ones(n, dtype=bool)
    for j in cls.fixed:
        free[j - 1] = False
    if not free.any():
        return p
    gamma = config.gamma
    cf, gf, gpf = model.c[1:][free], cls.g[free], cls.gprime[free]
    r = gamma * _boundary_gap(model, problem) - gf
    zeta = 1.0 + gamma * np.sum(cf / gpf)
    if abs(zeta) < ZETA_MIN:
        raise SingularReducedHessian(f"reduced Hessian denominator {zeta:.3e}")
    proj = np.sum(cf * r / gpf)
    p[free] = (r - gamma * proj / zeta) / gpf
    return p


def _sorted_pairs(b, cb):
    order = np.argsort(b, kind="stable")
    return b[order], cb[order]


def _line_energy(model, problem, config, p, eta):
    b, cb = _sorted_pairs(np.clip(model.b + eta * p, EDGE_EPS, 1.0 - EDGE_EPS), model.c[1:])
    c = np.concatenate([model.c[:1], cb])
    return energy_terms(model.alpha, b, c, problem, config.gamma, config.quad_order)


def line_search(model: ShallowModel, problem: ProblemSpec, config: SolverConfig,
                p: np.ndarray, j0: float | None = None) -> float:
    """Golden-section search of eta in [0, eta_max] with c held fixed.

    Returns 0 when no evaluated step lowers the energy.
    """
    if not np.any(p):
        return 0.0
    if j0 is None:
        j0 = _line_energy(model, problem, config, p, 0.0)
    lo, hi = 0.0, config.eta_max
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = _line_energy(model, problem, config, p, x1)
    f2 = _line_energy(model, problem, config, p, x2)
    best_eta, best_j = (x1, f1) if f1 <= f2 else (x2, f2)
    for _ in range(GOLDEN_ITERS):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = _line_energy(model, problem, config, p, x1)
            if f1 < best_j:
                best_eta, best_j = x1, f1
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = _line_energy(model, problem, config, p, x2)
            if f2 < best_j:
                best_eta, best_j = x2, f2
    if best_j < j0:
        return float(best_eta)
    return 0.0


def canonical_breakpoints(b) -> np.ndarray:
    """Sort, keep NUDGE away from 0 and 1 and push apart coincident breakpoints by NUDGE."""
    b = np.sort(np.clip(np.asarray(b, dtype=float), NUDGE, 1.0 - NUDGE))
    if b.size < 2:
        return b
    steps = NUDGE * np.arange(b.size)
    b = np.maximum.accumulate(b - steps) + steps
    top = 1.0 - NUDGE * np.arange(1, b.size + 1)[::-1]
    return np.minimum(b, top)


def redistribute(state: DbnState, cls: NeuronClassification) -> DbnState:
    """Move each non-contributing breakpoint to the midpoint of a random element."""
    model = state.model
    ext = model.knots.copy()
    c = model.c.copy()
    for l in sorted(cls.s1):
        m = int(state.rng.integers(1, model.n + 2))
        ext[l] = 0.5 * (ext[m - 1] + ext[m])
    b, cb = _sorted_pairs(ext[1:-1], c[1:])
    b = canonical_breakpoints(b)
    new = ShallowModel(model.alpha, b, np.concatenate([c[:1], cb]))
    return replace(state, model=new)


def _direction(model, problem, config, cls):
    try:
        return newton_direction(model, problem, config, cls)
    except SingularReducedHessian:
        free = [j for j in range(1, model.n + 1) if j not in cls.fixed]
        ratio = [abs(model.c[j] / cls.gprime[j - 1]) for j in free]
        worst = free[int(np.argmax(ratio))]
        log.debug("singular reduced Hessian; fixing neuron %d", worst)
        cls.s2.add(worst)
        try:
            return newton_direction(model, problem, config, cls)
        except SingularReducedHessian as exc:
            raise SingularReducedHessian(
                f"reduced Hessian singular after fixing neuron {worst}: {exc}"
            ) from exc


def dbn_solve(problem: ProblemSpec, config: SolverConfig, b0=None, *,
              neurons: int | None = None, early_stop: bool = False,
              record_error: bool = True, rng: np.random.Generator | None = None,
              report: RunReport | None = None) -> tuple[ShallowModel, RunReport]:
    """Run the damped block Newton iteration.

    ``b0`` gives the initial interior breakpoints; otherwise ``neurons``
    uniform breakpoints (counting b_0 = 0) are used. With ``early_stop`` the
    loop ends once consecutive relative residuals differ by less than
    ``config.tau``; otherwise exactly ``config.max_iters`` iterations run.
    """
    from .metrics import relative_h1_error

    if b0 is None:
        if neurons is None:
            raise ValueError("give b0 or neurons")
        b0 = uniform_breakpoints(neurons)
    b0 = np.asarray(b0, dtype=float)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    if report is None:
        report = RunReport(problem=problem.tag, method="dbn", config=config.to_dict(),
                           seed=config.seed)
    track_error = record_error and problem.has_exact

    c0 = np.zeros(b0.size + 1)
    state = DbnState(ShallowModel(problem.alpha, b0, c0), rng=rng)
    rr_prev = math.nan
    grad0 = None
    base = len(report.iterations)
    for k in range(config.max_iters):
        t0 = time.perf_counter()
        model = state.model
        c = linear.solve_coefficients(model.b, problem, config)
        model = model.with_c(c)
        j_solved = energy_terms(model.alpha, model.b, c, problem, config.gamma, config.quad_order)

        g = compute_g(model, problem, config.quad_order)
        grad_b = c[1:] * (g - config.gamma * _boundary_gap(model, problem))
        grad = math.hypot(np.linalg.norm(grad_b),
                          np.linalg.norm(gradient_c(model, problem, config)))
        if grad0 is None:
            grad0 = grad
        rr = grad / (1.0 + grad0)

        cls = classify(model, problem, config, g=g)
        p = _direction(model, problem, config, cls)
        eta = line_search(model, problem, config, p, j0=j_solved)
        if eta > 0.0:
            b_new, cb = _sorted_pairs(np.clip(model.b + eta * p, EDGE_EPS, 1.0 - EDGE_EPS), c[1:])
            b_new = canonical_breakpoints(b_new)
            moved = ShallowModel(model.alpha, b_new, np.concatenate([c[:1], cb]))
        else:
            moved = model
        j_step = energy_terms(moved.alpha, moved.b, moved.c, problem, config.gamma,
                              config.quad_order)
        state = DbnState(moved, k + 1, j_step, rr, rng)
        if cls.s1:
            # sorting may have permuted neurons; S1 follows the coefficients
            small = (np.abs(moved.c[1:]) < config.delta_c) & ~problem.is_kink(moved.b)
            moved_cls = NeuronClassification(set((np.flatnonzero(small) + 1).tolist()),
                                             set(), g, cls.gprime)
            state = redistribute(state, moved_cls)
        ms = 1e3 * (time.perf_counter() - t0)

        rec = {"k": base + k, "J": j_solved, "J_step": j_step, "eta": eta, "rr": rr,
               "redistributed": len(cls.s1), "fixed": len(cls.s2), "n": model.n, "ms": ms}
        rec["e_n"] = relative_h1_error(model, problem) if track_error else None
        rec["xi"] = None
        report.iterations.append(rec)

        if early_stop and k > 0 and abs(rr - rr_prev) < config.tau:
            break
        rr_prev = rr

    b_final = state.model.b
    c = linear.solve_coefficients(b_final, problem, config)
    final = ShallowModel(problem.alpha, b_final, c)
    report.model = final.to_dict()
    return final, report
