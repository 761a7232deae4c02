"""Tiny dependency-free SVG line charts for profiles and prediction bands.

The renderers take plain arrays (normally read back from the CSV artifacts)
and return SVG text; identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50


def _nice_ticks(lo, hi, n=5):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt(v):
    return f"{v:.6g}"


class _Axes:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.parts = []

    def px(self, x):
        return MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)

    def py(self, y):
        return HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)

    def _pts(self, xs, ys):
        return " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in zip(xs, ys)
                        if math.isfinite(x) and math.isfinite(y))

    def polyline(self, xs, ys, colour, width=2.0, dash=None):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="{width}"{extra} '
                          f'points="{self._pts(xs, ys)}"/>')

    def band(self, xs, lower, upper, colour):
        pts = self._pts(list(xs) + list(xs[::-1]), list(lower) + list(upper[::-1]))
        self.parts.append(f'<polygon fill="{colour}" fill-opacity="0.35" stroke="none" points="{pts}"/>')

    def dots(self, xs, ys, colour, r=3.5):
        for x, y in zip(xs, ys):
            self.parts.append(f'<circle cx="{self.px(x):.2f}" cy="{self.py(y):.2f}" r="{r}" fill="{colour}"/>')

    def hline(self, y, colour, width=1.5):
        self.polyline([self.x0, self.x1], [y, y], colour, width)

    def vline(self, x, colour, width=1.5):
        self.polyline([x, x], [self.y0, self.y1], colour, width)

    def render(self, title, xlabel, ylabel):
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
               f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
               f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
        left, right = MARGIN_L, WIDTH - MARGIN_R
        top, bottom = MARGIN_T, HEIGHT - MARGIN_B
        out.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                   f'fill="none" stroke="black"/>')
        for t in _nice_ticks(self.x0, self.x1):
            x = self.px(t)
            out.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{bottom + 18}" text-anchor="middle">{_fmt(t)}</text>')
        for t in _nice_ticks(self.y0, self.y1):
            y = self.py(t)
            out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
        out.append(f'<svg x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                   f'viewBox="{left} {top} {right - left} {bottom - top}" overflow="hidden">')
        out.extend(self.parts)
        out.append("</svg>")
        out.append(f'<text x="{WIDTH / 2}" y="{MARGIN_T - 14}" text-anchor="middle" '
                   f'font-size="14">{escape(title)}</text>')
        out.append(f'<text x="{(left + right) / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text transform="translate(16,{(top + bottom) / 2}) rotate(-90)" '
                   f'text-anchor="middle">{escape(ylabel)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _limits(*arrays, pad=0.05):
    vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays])
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo if hi > lo else max(abs(hi), 1.0)
    return lo - pad * span, hi + pad * span


def profile_svg(grid, values, name, threshold=None, mle=None) -> str:
    """Profile curve with the MLE marked and the threshold drawn as a horizontal line."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    extra = [threshold] if threshold is not None else []
    ylo, _ = _limits(values, extra)
    ax = _Axes((float(grid.min()), float(grid.max())), (ylo, 0.25))
    if threshold is not None:
        ax.hline(threshold, "#d4a017")
    if mle is not None:
        ax.vline(mle, "#1f4fd1")
    ax.polyline(grid, values, "#d62728")
    return ax.render(f"profile likelihood: {name}", name, "normalized log-likelihood")


def band_svg(coords, lower, mle_curve, upper, data_x=None, data_y=None, xlabel="coordinate") -> str:
    """Shaded prediction band with the MLE curve and, optionally, the data."""
    coords = np.asarray(coords, dtype=float)
    series = [lower, upper, mle_curve]
    if data_y is not None:
        series.append(data_y)
    xs = [coords] + ([data_x] if data_x is not None else [])
    ax = _Axes(_limits(*xs, pad=0.0), _limits(*series))
    ax.band(coords, np.asarray(lower), np.asarray(upper), "#2ca02c")
    ax.polyline(coords, mle_curve, "#d62728")
    if data_x is not None and data_y is not None:
        ax.dots(data_x, data_y, "#1f77b4")
    return ax.render("prediction band", xlabel, "observation")
