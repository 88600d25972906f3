"""Composite Gauss-Legendre quadrature over intervals and partitions.

Closed-form antiderivatives supplied by a problem always take precedence over
the routines here; quadrature is the fallback and the independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .errors import NonFiniteIntegrand

if TYPE_CHECKING:
    from .model import ProblemSpec

# Number of halvings used when a panel ends at a singular point.
GRADED_LEVELS = 80
_EDGE_TOL = 1e-14


@dataclass(frozen=True)
class QuadratureRule:
    order: int = 8
    panels_per_interval: int = 1

    def __post_init__(self):
        if self.order < 1 or self.panels_per_interval < 1:
            raise ValueError("order and panels_per_interval must be >= 1")


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]; exact for degree 2*order - 1."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise NonFiniteIntegrand(
            "integrand is not finite at a quadrature node; split the "
            "interval at the singular point"
        )


def _panel_edges(lo, hi, panels, graded_at):
    if graded_at is None:
        return np.linspace(lo, hi, panels + 1)
    # geometric grading with ratio 1/2 toward the graded endpoint
    frac = 0.5 ** np.arange(panels - 1, -1, -1, dtype=float)
    frac = np.concatenate([[0.0], frac])
    if graded_at == "lo":
        return lo + (hi - lo) * frac
    if graded_at == "hi":
        return (hi - (hi - lo) * frac)[::-1]
    raise ValueError("graded_at must be None, 'lo' or 'hi'")


def integrate(g: Callable, lo: float, hi: float, rule: QuadratureRule = QuadratureRule(),
              graded_at: str | None = None) -> float:
    """Composite Gauss-Legendre approximation of the integral of ``g`` on [lo, hi].

    With ``graded_at`` set to ``"lo"`` or ``"hi"`` the ``panels_per_interval``
    panels halve in length toward that endpoint, which handles integrable
    endpoint singularities.
    """
    if hi < lo:
        raise ValueError("integration bounds must satisfy lo <= hi")
    if hi == lo:
        return 0.0
    xg, wg = gauss_legendre(rule.order)
    edges = _panel_edges(lo, hi, rule.panels_per_interval, graded_at)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = mid[:, None] + half[:, None] * xg
    vals = np.asarray(g(x), dtype=float)
    _check_finite(vals)
    return float(np.sum(half * (vals @ wg)))


def _near_levels(width, gap):
    """Graded panels needed to resolve a singular point ``gap`` outside a piece."""
    return int(math.ceil(math.log2(width / gap))) + 4


def _subpanels(lo, hi, cuts, singular):
    """Split [lo, hi] at interior cuts; tag each piece with its graded end and panel count."""
    inner = [p for p in cuts if lo + _EDGE_TOL < p < hi - _EDGE_TOL]
    pts = [lo] + sorted(set(inner)) + [hi]
    pieces = []
    for a, b in zip(pts[:-1], pts[1:]):
        sa = any(abs(a - s) <= _EDGE_TOL for s in singular)
        sb = any(abs(b - s) <= _EDGE_TOL for s in singular)
        if sa and sb:
            m = 0.5 * (a + b)
            pieces += [(a, m, "lo", GRADED_LEVELS), (m, b, "hi", GRADED_LEVELS)]
        elif sa:
            pieces.append((a, b, "lo", GRADED_LEVELS))
        elif sb:
            pieces.append((a, b, "hi", GRADED_LEVELS))
        else:
            gap_lo = min((a - s for s in singular if s < a), default=math.inf)
            gap_hi = min((s - b for s in singular if s > b), default=math.inf)
            w = b - a
            if gap_lo < w and gap_lo <= gap_hi:
                pieces.append((a, b, "lo", _near_levels(w, gap_lo)))
            elif gap_hi < w:
                pieces.append((a, b, "hi", _near_levels(w, gap_hi)))
            else:
                pieces.append((a, b, None, 1))
    return pieces


def partition_integrals(g: Callable, edges: np.ndarray, order: int = 8,
                        breaks: Sequence[float] = (), singular: Sequence[float] = ()) -> np.ndarray:
    """Integral of ``g(x, k)`` over each element ``k`` of a partition.

    ``g`` receives an array of nodes and the matching array of element
    indices, so integrands may depend on per-element data. Elements that
    contain a point of ``breaks`` are split there; pieces ending at, or lying
    close to, a point of ``singular`` use geometrically graded panels.
    """
    edges = np.asarray(edges, dtype=float)
    nel = edges.size - 1
    xg, wg = gauss_legendre(order)
    lo, hi = edges[:-1], edges[1:]
    cuts = np.asarray(sorted(set(breaks) | set(singular)), dtype=float)

    irregular = np.zeros(nel, dtype=bool)
    for p in cuts:
        irregular |= (lo + _EDGE_TOL < p) & (p < hi - _EDGE_TOL)
    for p in singular:
        irregular |= (np.abs(lo - p) <= _EDGE_TOL) | (np.abs(hi - p) <= _EDGE_TOL)
        # singular point closer to the element than its width
        irregular |= ((lo - p > 0) & (lo - p < hi - lo)) | ((p - hi > 0) & (p - hi < hi - lo))

    out = np.zeros(nel)
    reg = np.flatnonzero(~irregular)
    if reg.size:
        mid = 0.5 * (lo[reg] + hi[reg])
        half = 0.5 * (hi[reg] - lo[reg])
        x = mid[:, None] + half[:, None] * xg
        k = np.broadcast_to(reg[:, None], x.shape)
        vals = np.asarray(g(x, k), dtype=float)
        _check_finite(vals)
        out[reg] = half * (vals @ wg)

    for e in np.flatnonzero(irregular):
        total = 0.0
        for a, b, graded, panels in _subpanels(lo[e], hi[e], cuts, singular):
            pe = _panel_edges(a, b, panels, graded)
            mid = 0.5 * (pe[1:] + pe[:-1])
            half = 0.5 * (pe[1:] - pe[:-1])
            x = mid[:, None] + half[:, None] * xg
            vals = np.asarray(g(x, np.full(x.shape, e)), dtype=float)
            _check_finite(vals)
            total += float(np.sum(half * (vals @ wg)))
        out[e] = total
    return out


def integrate_split(g: Callable, lo: float, hi: float, order: int = 8,
                    breaks: Sequence[float] = (), singular: Sequence[float] = ()) -> float:
    """Integral of a one-argument ``g`` over [lo, hi] split at breaks/singular points."""
    if hi <= lo:
        return 0.0
    vals = partition_integrals(lambda x, k: g(x), np.array([lo, hi]), order, breaks, singular)
    return float(vals[0])


def integrate_f_tail(problem: "ProblemSpec", t, order: int = 8):
    """Integral of the source from ``t`` to 1 (``t`` scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    if problem.F is not None:
        out = problem.F(1.0) - problem.F(t_arr)
    else:
        flat = np.atleast_1d(t_arr).ravel()
        out = np.array([
            integrate_split(problem.f, ti, 1.0, order, problem.breaks, problem.singular)
            for ti in flat
        ]).reshape(t_arr.shape)
    return float(out) if np.ndim(out) == 0 else out
