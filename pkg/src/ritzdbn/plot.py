"""Static SVG of a network approximation over the exact solution, with a breakpoint rug."""

from __future__ import annotations

import numpy as np

from .model import ProblemSpec, ShallowModel, evaluate

WIDTH, HEIGHT, PAD = 640, 400, 40


def _polyline(xs, ys, x_of, y_of, colour, dash=""):
    pts = " ".join(f"{x_of(x):.2f},{y_of(y):.2f}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{colour}" stroke-width="1.5"{extra} points="{pts}"/>'


def render_svg(model: ShallowModel, problem: ProblemSpec, samples: int = 400) -> str:
    xs = np.linspace(0.0, 1.0, samples + 1)
    approx = evaluate(model, xs)
    curves = [approx]
    exact = None
    if problem.u is not None:
        with np.errstate(all="ignore"):
            exact = np.asarray(problem.u(xs), dtype=float)
        curves.append(exact[np.isfinite(exact)])
    lo = min(float(np.min(c)) for c in curves)
    hi = max(float(np.max(c)) for c in curves)
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0

    def x_of(x):
        return PAD + x * (WIDTH - 2 * PAD)

    def y_of(y):
        return HEIGHT - PAD - (y - lo) / (hi - lo) * (HEIGHT - 2 * PAD)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{PAD}" y="{PAD}" width="{WIDTH - 2 * PAD}" height="{HEIGHT - 2 * PAD}" '
        'fill="none" stroke="#888"/>',
    ]
    if exact is not None:
        ok = np.isfinite(exact)
        parts.append(_polyline(xs[ok], exact[ok], x_of, y_of, "#1f77b4", "6,4"))
    parts.append(_polyline(model.knots, model.nodal_values(), x_of, y_of, "#d62728"))
    base = HEIGHT - PAD
    for b in model.b:
        parts.append(f'<line x1="{x_of(b):.2f}" y1="{base}" x2="{x_of(b):.2f}" '
                     f'y2="{base - 8}" stroke="black"/>')
    parts.append(f'<text x="{PAD}" y="{PAD - 12}" font-family="sans-serif" font-size="13">'
                 f'{problem.tag}: n = {model.n}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
