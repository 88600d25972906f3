"""Acceptance criteria 1 to 11, one test each.

Every test records a PASS/FAIL line; the summary hook in conftest prints
them after the run. Runtime budgets are asserted alongside the numbers.
"""

import statistics
import time

import numpy as np
import pytest

from ritzdbn import linear
from ritzdbn.baselines import afem_solve, bfgs_solve
from ritzdbn.adaptive import adbn_solve
from ritzdbn.dbn import dbn_solve, gradient_b, hessian_b, uniform_breakpoints
from ritzdbn.metrics import fit_rate, relative_h1_error
from ritzdbn.model import ShallowModel, SolverConfig
from ritzdbn.problems import make_problem

from conftest import CATALOG, random_breakpoints
from test_dbn import energy_violations
from oracles import direction_check, fd_gradient_b, fd_hessian_b, rel_err, smooth_state

SEEDS = (0, 1, 2)
RESULTS = {}


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def verdict(number, ok, detail):
    RESULTS[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[number])
    assert ok, detail


def _initial_model(problem, neurons, cfg):
    b = uniform_breakpoints(neurons)
    return ShallowModel(problem.alpha, b, linear.solve_coefficients(b, problem, cfg))


def test_criterion_01_stencil_inverse():
    rng = np.random.default_rng(1)
    problems = [make_problem("manufactured", name="linear"), make_problem("manufactured", name="variable"),
                make_problem("interface", k=10)]
    worst = 0.0
    with Clock() as clk:
        for n in (4, 16, 64):
            for trial in range(100):
                b = random_breakpoints(rng, n)
                data = linear.assemble_stiffness(b, problems[trial % 3])
                A = linear.dense_stiffness(data)
                inv = linear.apply_stiffness_inverse(data, np.eye(n + 1))
                worst = max(worst, np.max(np.abs(A @ inv - np.eye(n + 1))))
    verdict(1, worst <= 1e-10 and clk.seconds < 5, f"max|A A^-1 - I| = {worst:.2e}, {clk.seconds:.2f} s")


def test_criterion_02_condition_bound():
    rng = np.random.default_rng(2)
    p = make_problem("manufactured", name="linear")
    worst = 0.0
    with Clock() as clk:
        for n in (8, 32, 128):
            for _ in range(100):
                b = random_breakpoints(rng, n, min_gap=1e-4)
                A = linear.dense_stiffness(linear.assemble_stiffness(b, p))
                h_min = np.min(np.diff(np.concatenate([[0.0], b, [1.0]])))
                worst = max(worst, np.linalg.cond(A) / (4 * (n + 1) / h_min))
    verdict(2, worst <= 1.0 and clk.seconds < 30,
            f"max cond/(4(n+1)/h_min) = {worst:.3f}, {clk.seconds:.2f} s")


def test_criterion_03_derivative_oracles():
    cfg = SolverConfig()
    worst = [0.0, 0.0, 0.0]
    with Clock() as clk:
        for tag in CATALOG:
            p = make_problem(tag)
            rng = np.random.default_rng(3)
            for _ in range(20):
                m = smooth_state(p, rng, 8, cfg)
                worst[0] = max(worst[0], rel_err(gradient_b(m, p, cfg), fd_gradient_b(m, p, cfg)))
                worst[1] = max(worst[1], rel_err(hessian_b(m, p, cfg), fd_hessian_b(m, p, cfg)))
                fast, dense = direction_check(m, p, cfg)
                worst[2] = max(worst[2], rel_err(fast, dense))
    ok = worst[0] <= 1e-4 and worst[1] <= 1e-3 and worst[2] <= 1e-8 and clk.seconds < 60
    verdict(3, ok, f"gradient {worst[0]:.1e}, Hessian {worst[1]:.1e}, direction {worst[2]:.1e}, "
                   f"{clk.seconds:.1f} s")


def test_criterion_04_initial_errors():
    cases = [("exp_solution", 21, 1e4, 0.238, 0.01), ("x_two_thirds", 22, 1e4, 0.300, 0.01),
             ("interface(k=1000)", 15, 1e11, 0.203, 0.02)]
    got, ok = [], True
    with Clock() as clk:
        for tag, neurons, gamma, want, tol in cases:
            p = make_problem(tag)
            e = relative_h1_error(_initial_model(p, neurons, SolverConfig(gamma=gamma)), p)
            got.append(f"{e:.4f}")
            ok &= abs(e - want) <= tol * want
    verdict(4, ok and clk.seconds < 5, f"e_n = {', '.join(got)}, {clk.seconds:.2f} s")


def test_criterion_05_table1():
    p = make_problem("exp_solution")
    bands = {60: (2.3e-2, 5.0e-2), 120: (1.2e-2, 2.7e-2)}
    parts, ok = [], True
    with Clock() as clk:
        for n, (lo, hi) in bands.items():
            errs = []
            for seed in SEEDS:
                m, _ = dbn_solve(p, SolverConfig(max_iters=1000, seed=seed), neurons=n,
                                 record_error=False)
                errs.append(relative_h1_error(m, p))
            e = statistics.median(errs)
            r = fit_rate(n, e)
            ok &= lo <= e <= hi and 0.75 <= r <= 0.88
            parts.append(f"n={n} e_n={e:.4f} r={r:.3f}")
    verdict(5, ok and clk.seconds < 120, f"{'; '.join(parts)}, {clk.seconds:.1f} s")


def test_criterion_06_table3():
    p = make_problem("x_two_thirds")
    with Clock() as clk:
        m, _ = dbn_solve(p, SolverConfig(max_iters=250, seed=0), neurons=24, record_error=False)
        e_dbn = relative_h1_error(m, p)
        ma, rep = adbn_solve(p, SolverConfig(seed=0), 10, 3)
        e_adbn = relative_h1_error(ma, p)
        _, frep = afem_solve(p, 10, 1e-2, 16)
        e_afem = frep.refinements[-1]["e_n"]
    ok = e_dbn <= 8.5e-2 and e_adbn <= 7.5e-2 and 4e-2 <= e_afem <= 8e-2 and clk.seconds < 60
    verdict(6, ok, f"dBN(24) {e_dbn:.4f}, AdBN({ma.n + 1}) {e_adbn:.4f}, "
                   f"aFEM({frep.refinements[-1]['elements']}) {e_afem:.4f}, {clk.seconds:.1f} s")


def test_criterion_07_table4():
    parts, ok = [], True
    with Clock() as clk:
        for k in (10.0, 1e3, 1e6):
            p = make_problem("interface", k=k)
            cfg0 = SolverConfig(gamma=1e11)
            e0 = relative_h1_error(_initial_model(p, 15, cfg0), p)
            finals = []
            for seed in SEEDS:
                m, _ = dbn_solve(p, SolverConfig(gamma=1e11, max_iters=500, seed=seed),
                                 neurons=15, record_error=False)
                finals.append(relative_h1_error(m, p))
            e = statistics.median(finals)
            ok &= 0.17 <= e0 <= 0.21 and e <= 0.10
            parts.append(f"k={k:g} {e0:.3f}->{e:.3f}")
    verdict(7, ok and clk.seconds < 30, f"{'; '.join(parts)}, {clk.seconds:.1f} s")


def test_criterion_08_bfgs_comparison():
    p, budget = make_problem("exp_solution"), 100
    cfg = SolverConfig(max_iters=budget, seed=0)
    with Clock() as clk:
        model0 = _initial_model(p, 30, cfg)
        _, brep = bfgs_solve(p, cfg, model0, max_iters=budget)
        _, drep = dbn_solve(p, cfg, model0.b)
    e_bfgs = brep.iterations[-1]["e_n"]
    e_dbn = drep.iterations[-1]["e_n"]
    reach = next((r["k"] for r in drep.iterations if r["e_n"] <= e_bfgs), None)
    ok = e_dbn <= e_bfgs and reach is not None and reach <= 25 and clk.seconds < 60
    verdict(8, ok, f"BFGS {e_bfgs:.4f} after {len(brep.iterations) - 1} its, dBN {e_dbn:.4f}, "
                   f"dBN reaches BFGS error at k={reach}, {clk.seconds:.1f} s")


def test_criterion_09_cost_scaling():
    p = make_problem("exp_solution")

    def per_iteration(n):
        _, rep = dbn_solve(p, SolverConfig(max_iters=30, seed=0), neurons=n, record_error=False)
        return statistics.median(r["ms"] for r in rep.iterations[5:])

    with Clock() as clk:
        per_iteration(256)  # warm-up
        t512, t1024 = per_iteration(512), per_iteration(1024)
    ratio = t1024 / t512
    verdict(9, ratio <= 3.0 and clk.seconds < 60,
            f"{t512:.2f} ms at n=512, {t1024:.2f} ms at n=1024, ratio {ratio:.2f}")


def test_criterion_10_energy_monotone():
    worst = -np.inf
    for tag in CATALOG:
        p = make_problem(tag)
        gamma = 1e11 if tag.startswith("interface") else 1e4
        for seed in SEEDS:
            _, rep = dbn_solve(p, SolverConfig(max_iters=60, gamma=gamma, seed=seed), neurons=16,
                               record_error=False)
            worst = max(worst, energy_violations(rep, slack=1e-12))
    verdict(10, worst <= 0.0, f"largest energy increase beyond slack {worst:.2e}")


def test_criterion_11_kkt_vs_penalty():
    # On the smooth problem the multiplier vanishes, so both solutions agree to
    # rounding at every gamma; the 100x / 10x ratio is checked where it is measurable.
    b = np.arange(1, 21) / 21
    parts, ok = [], True
    for tag in ("exp_solution", "x_two_thirds"):
        p = make_problem(tag)
        c_kkt, lam = linear.solve_coefficients_kkt(b, p)
        gaps = [np.max(np.abs(linear.solve_coefficients(b, p, SolverConfig(gamma=g)) - c_kkt))
                for g in (1e4, 1e6, 1e8)]
        floor = 1e-13 * max(1.0, np.max(np.abs(c_kkt)))
        if max(gaps) <= floor:
            parts.append(f"{tag}: multiplier {lam:.1e}, gaps at rounding level")
        else:
            ok &= gaps[0] >= 10 * gaps[1] and gaps[1] >= 10 * gaps[2]
            parts.append(f"{tag}: gaps " + ", ".join(f"{g:.2e}" for g in gaps))
    verdict(11, ok, "; ".join(parts))
