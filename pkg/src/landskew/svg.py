"""Hand-rolled deterministic SVG plots (no timestamps, fixed formatting).

Numbers are formatted with fixed precision and elements are emitted in input
order, so rendering the same data twice produces byte-identical files.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .elastic import Warp
from .landscape import Landscape
from .persistence import PersistenceDiagram

__all__ = [
    "SvgPlot",
    "PALETTE",
    "plot_landscapes",
    "plot_warps",
    "plot_diagrams",
    "plot_scores",
    "plot_trace",
    "plot_point_cloud",
]

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.4g}"


class SvgPlot:
    """Minimal line/scatter plot with axes, ticks, and a title."""

    def __init__(self, width: int = 720, height: int = 480,
                 title: Optional[str] = None) -> None:
        self.width = width
        self.height = height
        self.title = title
        self.margin_l, self.margin_r = 62, 18
        self.margin_t = 40 if title else 22
        self.margin_b = 46
        self._elems: list[str] = []
        self._xlim = (0.0, 1.0)
        self._ylim = (0.0, 1.0)
        self.xlabel: Optional[str] = None
        self.ylabel: Optional[str] = None

    # ---- coordinates ----
    def set_limits(self, xmin, xmax, ymin, ymax, pad: float = 0.05) -> None:
        dx = (xmax - xmin) or 1.0
        dy = (ymax - ymin) or 1.0
        self._xlim = (xmin - pad * dx, xmax + pad * dx)
        self._ylim = (ymin - pad * dy, ymax + pad * dy)

    def _px(self, x: float) -> float:
        x0, x1 = self._xlim
        inner = self.width - self.margin_l - self.margin_r
        return self.margin_l + (x - x0) / (x1 - x0) * inner

    def _py(self, y: float) -> float:
        y0, y1 = self._ylim
        inner = self.height - self.margin_t - self.margin_b
        return self.height - self.margin_b - (y - y0) / (y1 - y0) * inner

    # ---- elements ----
    def polyline(self, xs, ys, color: str, width: float = 1.5,
                 dash: Optional[str] = None, opacity: float = 1.0) -> None:
        pts = " ".join(f"{_fmt(self._px(x))},{_fmt(self._py(y))}"
                       for x, y in zip(xs, ys))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        op = f' stroke-opacity="{opacity:.2f}"' if opacity < 1.0 else ""
        self._elems.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width:.2f}"{dash_attr}{op}/>')

    def scatter(self, xs, ys, color: str, r: float = 3.0,
                opacity: float = 1.0) -> None:
        op = f' fill-opacity="{opacity:.2f}"' if opacity < 1.0 else ""
        for x, y in zip(xs, ys):
            self._elems.append(
                f'<circle cx="{_fmt(self._px(x))}" cy="{_fmt(self._py(y))}" '
                f'r="{r:.1f}" fill="{color}"{op}/>')

    def segment(self, x0, y0, x1, y1, color: str, width: float = 1.0,
                dash: Optional[str] = None) -> None:
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self._elems.append(
            f'<line x1="{_fmt(self._px(x0))}" y1="{_fmt(self._py(y0))}" '
            f'x2="{_fmt(self._px(x1))}" y2="{_fmt(self._py(y1))}" '
            f'stroke="{color}" stroke-width="{width:.2f}"{dash_attr}/>')

    def legend(self, entries: Sequence[tuple[str, str]]) -> None:
        x = self.width - self.margin_r - 150
        y = self.margin_t + 8
        for i, (label, color) in enumerate(entries):
            yy = y + 18 * i
            self._elems.append(
                f'<rect x="{x}" y="{yy - 9}" width="12" height="12" '
                f'fill="{color}"/>')
            self._elems.append(
                f'<text x="{x + 18}" y="{yy + 2}" font-size="12" '
                f'fill="#333">{label}</text>')

    # ---- output ----
    def _axes(self) -> list[str]:
        out = []
        x0, x1 = self._xlim
        y0, y1 = self._ylim
        left, right = self.margin_l, self.width - self.margin_r
        top, bottom = self.margin_t, self.height - self.margin_b
        out.append(f'<rect x="{left}" y="{top}" width="{right - left}" '
                   f'height="{bottom - top}" fill="none" stroke="#888" '
                   f'stroke-width="1.00"/>')
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            xv = x0 + frac * (x1 - x0)
            yv = y0 + frac * (y1 - y0)
            px, py = self._px(xv), self._py(yv)
            out.append(f'<line x1="{_fmt(px)}" y1="{bottom}" x2="{_fmt(px)}" '
                       f'y2="{bottom + 5}" stroke="#888" stroke-width="1.00"/>')
            out.append(f'<text x="{_fmt(px)}" y="{bottom + 20}" '
                       f'font-size="11" fill="#333" text-anchor="middle">'
                       f'{_tick_label(xv)}</text>')
            out.append(f'<line x1="{left - 5}" y1="{_fmt(py)}" x2="{left}" '
                       f'y2="{_fmt(py)}" stroke="#888" stroke-width="1.00"/>')
            out.append(f'<text x="{left - 8}" y="{_fmt(py + 4)}" '
                       f'font-size="11" fill="#333" text-anchor="end">'
                       f'{_tick_label(yv)}</text>')
        if self.title:
            out.append(f'<text x="{self.width // 2}" y="24" font-size="15" '
                       f'fill="#111" text-anchor="middle">{self.title}</text>')
        if self.xlabel:
            out.append(f'<text x="{(left + right) // 2}" '
                       f'y="{self.height - 8}" font-size="12" fill="#333" '
                       f'text-anchor="middle">{self.xlabel}</text>')
        if self.ylabel:
            out.append(f'<text x="16" y="{(top + bottom) // 2}" '
                       f'font-size="12" fill="#333" text-anchor="middle" '
                       f'transform="rotate(-90 16 {(top + bottom) // 2})">'
                       f'{self.ylabel}</text>')
        return out

    def to_svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">\n'
                f'<rect width="{self.width}" height="{self.height}" '
                f'fill="#ffffff"/>\n')
        body = "\n".join(self._axes() + self._elems)
        return head + body + "\n</svg>\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_svg())


# ---------------------------------------------------------------------------
# canned figures
# ---------------------------------------------------------------------------

def plot_landscapes(landscapes: Sequence[Landscape], path,
                    mean: Optional[Landscape] = None,
                    title: Optional[str] = None) -> None:
    """Overlay of landscape levels; optional thick mean curve on top."""
    plot = SvgPlot(title=title)
    ymax = max(ls.values.max() for ls in landscapes) if landscapes else 1.0
    if mean is not None:
        ymax = max(ymax, mean.values.max())
    plot.set_limits(0.0, 1.0, 0.0, max(ymax, 1e-9))
    plot.xlabel, plot.ylabel = "normalised scale t", "level value"
    for i, ls in enumerate(landscapes):
        color = PALETTE[i % len(PALETTE)]
        for k in range(ls.K):
            plot.polyline(ls.grid, ls.values[k], color,
                          width=1.2, opacity=0.65)
    if mean is not None:
        for k in range(mean.K):
            plot.polyline(mean.grid, mean.values[k], "#000000", width=2.6)
    plot.save(path)


def plot_warps(warps: Sequence[Warp], path,
               title: Optional[str] = None) -> None:
    plot = SvgPlot(title=title)
    plot.set_limits(0.0, 1.0, 0.0, 1.0, pad=0.02)
    plot.xlabel, plot.ylabel = "t", "warp(t)"
    plot.segment(0.0, 0.0, 1.0, 1.0, "#555555", width=1.2, dash="5,4")
    for i, w in enumerate(warps):
        plot.polyline(w.grid, w.values, PALETTE[i % len(PALETTE)],
                      width=1.4, opacity=0.8)
    plot.save(path)


def plot_diagrams(diagrams: Sequence[PersistenceDiagram], path,
                  title: Optional[str] = None) -> None:
    """Birth/death scatter with the birth-equals-death diagonal."""
    plot = SvgPlot(title=title)
    hi = 1.0
    for dg in diagrams:
        if dg.pairs.size:
            hi = max(hi, float(dg.pairs.max()))
    plot.set_limits(0.0, hi, 0.0, hi, pad=0.06)
    plot.xlabel, plot.ylabel = "birth", "death"
    plot.segment(0.0, 0.0, hi, hi, "#555555", width=1.2, dash="5,4")
    for i, dg in enumerate(diagrams):
        if dg.pairs.size:
            plot.scatter(dg.pairs[:, 0], dg.pairs[:, 1],
                         PALETTE[i % len(PALETTE)], r=3.4, opacity=0.85)
    plot.save(path)


def plot_scores(scores: np.ndarray, path,
                labels: Optional[Sequence[str]] = None,
                title: Optional[str] = None) -> None:
    """Scatter of the first two component scores, coloured by group label."""
    scores = np.atleast_2d(np.asarray(scores, np.float64))
    x = scores[:, 0]
    y = scores[:, 1] if scores.shape[1] > 1 else np.zeros_like(x)
    plot = SvgPlot(title=title)
    plot.set_limits(float(x.min()), float(x.max()),
                    float(y.min()), float(y.max()), pad=0.1)
    plot.xlabel, plot.ylabel = "component 1 score", "component 2 score"
    if labels is None:
        plot.scatter(x, y, PALETTE[0], r=4.0)
    else:
        uniq = sorted(set(labels))
        for j, lab in enumerate(uniq):
            sel = [i for i, g in enumerate(labels) if g == lab]
            plot.scatter(x[sel], y[sel], PALETTE[j % len(PALETTE)], r=4.0)
        plot.legend([(lab, PALETTE[j % len(PALETTE)])
                     for j, lab in enumerate(uniq)])
    plot.save(path)


def plot_trace(trace: np.ndarray, path,
               title: Optional[str] = None) -> None:
    trace = np.asarray(trace, np.float64).ravel()
    plot = SvgPlot(title=title)
    plot.set_limits(0.0, max(trace.size - 1, 1),
                    0.0, float(trace.max()) if trace.size else 1.0)
    plot.xlabel, plot.ylabel = "iteration", "alignment error"
    plot.polyline(np.arange(trace.size), trace, PALETTE[0], width=2.0)
    plot.scatter(np.arange(trace.size), trace, PALETTE[0], r=3.0)
    plot.save(path)


def plot_point_cloud(points: np.ndarray, path,
                     title: Optional[str] = None) -> None:
    pts = np.asarray(points, np.float64)
    plot = SvgPlot(width=560, height=560, title=title)
    plot.set_limits(float(pts[:, 0].min()), float(pts[:, 0].max()),
                    float(pts[:, 1].min()), float(pts[:, 1].max()), pad=0.08)
    plot.xlabel, plot.ylabel = "x", "y"
    plot.scatter(pts[:, 0], pts[:, 1], PALETTE[0], r=2.6, opacity=0.8)
    plot.save(path)
