import numpy as np
import pytest

from ritzdbn.model import ProblemSpec, ShallowModel, SolverConfig
from ritzdbn.problems import make_problem

CATALOG = ("exp_solution", "x_two_thirds", "interface(k=10)", "interface(k=1000)",
           "manufactured(variable)")


@pytest.fixture
def linear_problem():
    return make_problem("manufactured", name="linear")


@pytest.fixture
def parabola():
    return make_problem("manufactured", name="parabola")


def constant_source(value, alpha=0.0, beta=0.0):
    """a = 1, f = value, closed forms supplied."""
    return ProblemSpec(a=np.ones_like, a_prime=np.zeros_like,
                       f=lambda x: value * np.ones_like(np.asarray(x, dtype=float)),
                       alpha=alpha, beta=beta,
                       A1=lambda x: np.asarray(x, dtype=float),
                       F=lambda x: value * np.asarray(x, dtype=float),
                       FF=lambda x: 0.5 * value * np.asarray(x, dtype=float) ** 2)


def random_breakpoints(rng, n, lo=0.0, hi=1.0, min_gap=1e-3):
    while True:
        b = np.sort(rng.uniform(lo, hi, n))
        knots = np.concatenate([[lo], b, [hi]])
        if np.min(np.diff(knots)) > min_gap:
            return b


def random_state(problem, rng, n=12, config=None):
    """Sorted breakpoints away from kinks and singular points, c from the linear solve."""
    from ritzdbn.linear import solve_coefficients

    config = config or SolverConfig()
    while True:
        b = random_breakpoints(rng, n, 0.02, 0.98, min_gap=5e-3)
        if all(np.min(np.abs(b - p)) > 1e-2 for p in problem.kinks):
            break
    return ShallowModel(problem.alpha, b, solve_coefficients(b, problem, config))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
