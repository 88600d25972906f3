"""Catalog of test problems with closed-form data and exact solutions."""

from __future__ import annotations

import numpy as np

from .errors import UnknownProblem
from .model import ProblemSpec

_ONE = np.ones_like
_ZERO = np.zeros_like

# Gaussian bump: u = x (E(x) - E0), E = exp(-(x - 1/3)^2 / W)
_W = 0.01


def _bump(x):
    return np.exp(-((x - 1.0 / 3.0) ** 2) / _W)


# exp(-4 / (9 W)), taken from the bump itself so that u(1) = 0 exactly
_E0 = float(_bump(1.0))


def _exp_u(x):
    x = np.asarray(x, dtype=float)
    return x * (_bump(x) - _E0)


def _exp_du(x):
    x = np.asarray(x, dtype=float)
    e = _bump(x)
    return e - _E0 - x * (2.0 / _W) * (x - 1.0 / 3.0) * e


def _exp_f(x):
    # f = -u'' with u'' = 2E' + x E''
    x = np.asarray(x, dtype=float)
    e = _bump(x)
    y = x - 1.0 / 3.0
    e1 = -(2.0 / _W) * y * e
    e2 = e * ((2.0 * y / _W) ** 2 - 2.0 / _W)
    return -(2.0 * e1 + x * e2)


def exp_solution() -> ProblemSpec:
    return ProblemSpec(
        a=_ONE, a_prime=_ZERO, f=_exp_f,
        alpha=0.0, beta=0.0,
        A1=lambda x: np.asarray(x, dtype=float),
        F=lambda x: -_exp_du(x),
        FF=lambda x: -_exp_u(x),
        u=_exp_u, du=_exp_du, tag="exp_solution",
    )


def _pow(x, p):
    with np.errstate(divide="ignore"):
        return np.asarray(x, dtype=float) ** p


def x_two_thirds() -> ProblemSpec:
    return ProblemSpec(
        a=_ONE, a_prime=_ZERO,
        f=lambda x: (2.0 / 9.0) * _pow(x, -4.0 / 3.0),
        alpha=0.0, beta=1.0,
        A1=lambda x: np.asarray(x, dtype=float),
        F=lambda x: -(2.0 / 3.0) * _pow(x, -1.0 / 3.0),
        FF=lambda x: -_pow(x, 2.0 / 3.0),
        singular=(0.0,),
        u=lambda x: _pow(x, 2.0 / 3.0),
        du=lambda x: (2.0 / 3.0) * _pow(x, -1.0 / 3.0),
        tag="x_two_thirds",
    )


def interface(k: float) -> ProblemSpec:
    """a = 1 + (k - 1) H(x - 1/2); flux a u' is continuous at 1/2."""
    if not k > 0:
        raise ValueError("interface problem requires k > 0")
    k = float(k)
    h = 0.5

    def a(x):
        return np.where(np.asarray(x) < h, 1.0, k)

    def A1(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < h, x, h + k * (x - h))

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < h, 8.0 * k * (3.0 * x - 1.0), 4.0 * k * (k + 1.0))

    def F(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < h, 12.0 * k * x**2 - 8.0 * k * x, -k + 4.0 * k * (k + 1.0) * (x - h))

    def FF(x):
        x = np.asarray(x, dtype=float)
        left = 4.0 * k * x**3 - 4.0 * k * x**2
        right = -0.5 * k - k * (x - h) + 2.0 * k * (k + 1.0) * (x - h) ** 2
        return np.where(x < h, left, right)

    def u(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < h, 4.0 * k * x**2 * (1.0 - x), (2.0 * (k + 1.0) * x - 1.0) * (1.0 - x))

    def du(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < h, 4.0 * k * (2.0 * x - 3.0 * x**2),
                        2.0 * (k + 1.0) * (1.0 - 2.0 * x) + 1.0)

    return ProblemSpec(a=a, a_prime=_ZERO, f=f, alpha=0.0, beta=0.0, A1=A1, F=F, FF=FF,
                       kinks=(h,), jumps=(h,), u=u, du=du, tag=f"interface(k={k:g})")


def _linear():
    return ProblemSpec(a=_ONE, a_prime=_ZERO, f=_ZERO, alpha=0.0, beta=1.0,
                       A1=lambda x: np.asarray(x, dtype=float),
                       F=_ZERO, FF=_ZERO,
                       u=lambda x: np.asarray(x, dtype=float), du=_ONE,
                       tag="manufactured(linear)")


def _parabola():
    return ProblemSpec(a=_ONE, a_prime=_ZERO, f=lambda x: 2.0 * _ONE(x), alpha=0.0, beta=0.0,
                       A1=lambda x: np.asarray(x, dtype=float),
                       F=lambda x: 2.0 * np.asarray(x, dtype=float),
                       FF=lambda x: np.asarray(x, dtype=float) ** 2,
                       u=lambda x: x * (1.0 - x), du=lambda x: 1.0 - 2.0 * np.asarray(x),
                       tag="manufactured(parabola)")


def _variable():
    # a = 1 + x, u = x (1 - x)  =>  f = 1 + 4x
    return ProblemSpec(a=lambda x: 1.0 + np.asarray(x), a_prime=_ONE,
                       f=lambda x: 1.0 + 4.0 * np.asarray(x),
                       alpha=0.0, beta=0.0,
                       A1=lambda x: x + 0.5 * np.asarray(x) ** 2,
                       F=lambda x: x + 2.0 * np.asarray(x) ** 2,
                       FF=lambda x: 0.5 * np.asarray(x) ** 2 + (2.0 / 3.0) * np.asarray(x) ** 3,
                       u=lambda x: x * (1.0 - x), du=lambda x: 1.0 - 2.0 * np.asarray(x),
                       tag="manufactured(variable)")


def _sine():
    # no antiderivatives: exercises the quadrature paths
    return ProblemSpec(a=_ONE, a_prime=_ZERO,
                       f=lambda x: np.pi**2 * np.sin(np.pi * np.asarray(x)),
                       alpha=0.0, beta=0.0,
                       u=lambda x: np.sin(np.pi * np.asarray(x)),
                       du=lambda x: np.pi * np.cos(np.pi * np.asarray(x)),
                       tag="manufactured(sine)")


MANUFACTURED = {"linear": _linear, "parabola": _parabola, "variable": _variable, "sine": _sine}
TAGS = ("exp_solution", "x_two_thirds", "interface", "manufactured")


def make_problem(tag: str, k: float | None = None, name: str | None = None) -> ProblemSpec:
    """Build a catalog problem.

    ``tag`` is one of ``exp_solution``, ``x_two_thirds``, ``interface`` (with
    ``k``) or ``manufactured`` (with ``name``); ``manufactured(name)`` and
    ``interface(k)`` spellings are accepted as well.
    """
    tag = tag.strip()
    if tag.endswith(")") and "(" in tag:
        head, arg = tag[:-1].split("(", 1)
        arg = arg.split("=")[-1]
        if head == "interface":
            return interface(float(arg))
        if head == "manufactured":
            return make_problem("manufactured", name=arg)
        raise UnknownProblem(tag)
    if tag == "exp_solution":
        return exp_solution()
    if tag == "x_two_thirds":
        return x_two_thirds()
    if tag == "interface":
        return interface(10.0 if k is None else k)
    if tag == "manufactured":
        if name not in MANUFACTURED:
            raise UnknownProblem(f"manufactured({name})")
        return MANUFACTURED[name]()
    raise UnknownProblem(tag)
