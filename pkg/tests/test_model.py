import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ritzdbn.linear import solve_coefficients, solve_coefficients_kkt
from ritzdbn.model import (ProblemSpec, ShallowModel, SolverConfig, energy, evaluate,
                           evaluate_derivative)

from conftest import constant_source


def test_single_neuron_is_identity():
    assert evaluate(ShallowModel(0.0, [], [1.0]), 0.7) == pytest.approx(0.7)


def test_offset_and_shifted_neuron():
    assert evaluate(ShallowModel(2.0, [0.5], [0.0, 3.0]), 0.75) == pytest.approx(2.75)


def test_ritz_coefficients_vanish_at_one():
    b = np.array([0.5])
    c, _ = solve_coefficients_kkt(b, constant_source(2.0))
    np.testing.assert_allclose(c, [0.5, -1.0], atol=1e-14)
    assert evaluate(ShallowModel(0.0, b, [0.5, -1.0]), 1.0) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("x, want", [(0.3, 1.0), (0.9, 3.0), (0.2, 1.0)])
def test_derivative(x, want):
    model = ShallowModel(0.0, [0.4], [1.0, 2.0]) if x != 0.3 else ShallowModel(0.0, [], [1.0])
    assert evaluate_derivative(model, x) == want


def test_derivative_right_limit_at_breakpoint():
    assert evaluate_derivative(ShallowModel(0.0, [0.4], [1.0, 2.0]), 0.4) == 3.0


def test_invariants_enforced():
    with pytest.raises(ValueError):
        ShallowModel(0.0, [0.5, 0.5], [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        ShallowModel(0.0, [0.5], [1.0])
    with pytest.raises(ValueError):
        ShallowModel(0.0, [1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        ProblemSpec(a=lambda x: np.asarray(x) - 0.5, a_prime=np.ones_like, f=np.zeros_like,
                    alpha=0.0, beta=0.0)
    with pytest.raises(ValueError):
        ProblemSpec(a=np.ones_like, a_prime=np.zeros_like, f=np.zeros_like, alpha=0.0,
                    beta=0.0, kinks=(0.7, 0.2))


def test_model_arrays_are_read_only():
    m = ShallowModel(0.0, [0.5], [1.0, 2.0])
    with pytest.raises(ValueError):
        m.b[0] = 0.1


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(gamma=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)
    with pytest.raises(ValueError):
        SolverConfig(tau=-1.0)


def test_dict_round_trip():
    m = ShallowModel(0.25, [0.1, 0.6], [1.0, -2.0, 0.5])
    assert ShallowModel.from_dict(m.to_dict()) == m


def test_energy_zero_network():
    m = ShallowModel(0.0, [0.3, 0.6], [0.0, 0.0, 0.0])
    assert energy(m, constant_source(0.0), SolverConfig()) == 0.0


def test_energy_of_exact_linear(linear_problem):
    m = ShallowModel(0.0, [], [1.0])
    assert energy(m, linear_problem, SolverConfig(gamma=1e4)) == pytest.approx(0.5)


def test_energy_minimal_at_linear_solve():
    problem, cfg = constant_source(2.0), SolverConfig()
    b = np.array([0.5])
    c = solve_coefficients(b, problem, cfg)
    j0 = energy(ShallowModel(0.0, b, c), problem, cfg)
    rng = np.random.default_rng(0)
    for _ in range(100):
        dc = rng.normal(scale=10.0 ** rng.uniform(-6, 0), size=2)
        assert energy(ShallowModel(0.0, b, c + dc), problem, cfg) >= j0


models = st.integers(0, 8).flatmap(lambda n: st.tuples(
    st.floats(-2, 2),
    st.lists(st.floats(0.01, 0.99), min_size=n, max_size=n, unique=True),
    st.lists(st.floats(-5, 5), min_size=n + 1, max_size=n + 1)))


def _build(data):
    alpha, b, c = data
    b = np.sort(b)
    if b.size > 1 and np.min(np.diff(b)) < 1e-3:
        b = np.linspace(0.05, 0.95, b.size)
    return ShallowModel(alpha, b, c)


@settings(max_examples=60, deadline=None)
@given(models)
def test_evaluate_matches_relu_sum_and_interpolant(data):
    m = _build(data)
    xs = np.linspace(0.0, 1.0, 101)
    relu = m.alpha + np.maximum(0.0, xs[:, None] - m.knots[None, :-1]) @ m.c
    np.testing.assert_allclose(evaluate(m, xs), relu, atol=1e-10)
    np.testing.assert_allclose(evaluate(m, xs), np.interp(xs, m.knots, m.nodal_values()), atol=1e-10)
    assert evaluate(m, 0.0) == m.alpha


@settings(max_examples=60, deadline=None)
@given(models, st.floats(0.001, 0.999))
def test_derivative_matches_central_difference(data, x):
    m = _build(data)
    if np.any(np.abs(m.b - x) < 1e-5):
        return
    h = 1e-7
    fd = (evaluate(m, x + h) - evaluate(m, x - h)) / (2 * h)
    assert fd == pytest.approx(evaluate_derivative(m, x), rel=1e-6, abs=1e-6)
