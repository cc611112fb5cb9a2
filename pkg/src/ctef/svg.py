"""Minimal SVG output: box plots and 2-d scatter plots with ellipse outlines."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

WIDTH, HEIGHT = 480, 360
MARGIN = dict(left=64, right=16, top=36, bottom=48)


def box_stats(values) -> dict:
    """Median, quartiles and whiskers at 1.5 IQR (last datum inside the fence)."""
    x = np.sort(np.asarray(values, dtype=float))
    x = x[np.isfinite(x)]
    if x.size == 0:
        nan = float("nan")
        return dict(n=0, median=nan, q1=nan, q3=nan, whisker_low=nan, whisker_high=nan, n_outliers=0)
    q1, med, q3 = np.percentile(x, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    return dict(
        n=int(x.size),
        median=float(med),
        q1=float(q1),
        q3=float(q3),
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        n_outliers=int(x.size - inside.size),
    )


def _fmt(v):
    return f"{v:.4g}"


def _frame(title, xlabel, ylabel):
    w, h = WIDTH, HEIGHT
    m = MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{w / 2}" y="{h - 8}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{h / 2}" text-anchor="middle" transform="rotate(-90 14 {h / 2})">'
        f'{escape(ylabel)}</text>',
        f'<rect x="{m["left"]}" y="{m["top"]}" width="{w - m["left"] - m["right"]}" '
        f'height="{h - m["top"] - m["bottom"]}" fill="none" stroke="black"/>',
    ]
    return parts


def _yaxis(parts, lo, hi, to_y):
    m = MARGIN
    for t in np.linspace(lo, hi, 5):
        y = to_y(t)
        parts.append(f'<line x1="{m["left"] - 4}" x2="{m["left"]}" y1="{y:.1f}" y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{m["left"] - 6}" y="{y + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')


def box_plot(groups, labels, title="", xlabel="", ylabel="", exceed=None) -> str:
    """Box plot of several samples; ``exceed`` optionally annotates counts in red."""
    stats = [box_stats(g) for g in groups]
    finite = [v for s in stats for v in (s["whisker_low"], s["whisker_high"]) if np.isfinite(v)]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    m = MARGIN
    plot_h = HEIGHT - m["top"] - m["bottom"]
    plot_w = WIDTH - m["left"] - m["right"]

    def to_y(v):
        return m["top"] + plot_h * (hi - v) / (hi - lo)

    parts = _frame(title, xlabel, ylabel)
    _yaxis(parts, lo, hi, to_y)
    k = max(len(stats), 1)
    slot = plot_w / k
    for i, (s, label) in enumerate(zip(stats, labels)):
        cx = m["left"] + slot * (i + 0.5)
        half = min(24.0, 0.3 * slot)
        parts.append(f'<text x="{cx:.1f}" y="{HEIGHT - m["bottom"] + 16}" text-anchor="middle">'
                     f'{escape(str(label))}</text>')
        if s["n"] == 0:
            continue
        y_q1, y_q3, y_med = to_y(s["q1"]), to_y(s["q3"]), to_y(s["median"])
        y_lo, y_hi = to_y(s["whisker_low"]), to_y(s["whisker_high"])
        parts.append(f'<line x1="{cx:.1f}" x2="{cx:.1f}" y1="{y_hi:.1f}" y2="{y_q3:.1f}" stroke="black"/>')
        parts.append(f'<line x1="{cx:.1f}" x2="{cx:.1f}" y1="{y_q1:.1f}" y2="{y_lo:.1f}" stroke="black"/>')
        for y in (y_lo, y_hi):
            parts.append(f'<line x1="{cx - half / 2:.1f}" x2="{cx + half / 2:.1f}" '
                         f'y1="{y:.1f}" y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<rect x="{cx - half:.1f}" y="{y_q3:.1f}" width="{2 * half:.1f}" '
                     f'height="{max(y_q1 - y_q3, 0.5):.1f}" fill="#dde8f3" stroke="black"/>')
        parts.append(f'<line x1="{cx - half:.1f}" x2="{cx + half:.1f}" y1="{y_med:.1f}" '
                     f'y2="{y_med:.1f}" stroke="#ff7f0e" stroke-width="2"/>')
        if exceed is not None and exceed[i]:
            parts.append(f'<text x="{cx:.1f}" y="{m["top"] + 12}" text-anchor="middle" '
                         f'fill="red">{int(exceed[i])}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def ellipse_outline(center, rotation, axis_lengths, n: int = 200) -> np.ndarray:
    t = np.linspace(0, 2 * np.pi, n)
    eta = np.column_stack([np.cos(t), np.sin(t)])
    return (eta * axis_lengths) @ rotation + center


def scatter_plot(X, labels=None, outlines=(), title="") -> str:
    """2-d scatter coloured by label, with optional closed outlines on top."""
    X = np.asarray(X, dtype=float)
    labels = np.zeros(len(X), dtype=int) if labels is None else np.asarray(labels)
    pts = np.vstack([X] + [np.asarray(o) for o in outlines]) if len(outlines) else X
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = float(np.max(hi - lo)) or 1.0
    mid = 0.5 * (lo + hi)
    lo, hi = mid - 0.55 * span, mid + 0.55 * span
    m = MARGIN
    plot_h = HEIGHT - m["top"] - m["bottom"]
    plot_w = WIDTH - m["left"] - m["right"]
    side = min(plot_w, plot_h)

    def to_xy(q):
        x = m["left"] + side * (q[..., 0] - lo[0]) / (hi[0] - lo[0])
        y = m["top"] + side * (hi[1] - q[..., 1]) / (hi[1] - lo[1])
        return x, y

    parts = _frame(title, "x1", "x2")
    xs, ys = to_xy(X)
    for x, y, lab in zip(xs, ys, labels):
        parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.2" fill="{PALETTE[int(lab) % len(PALETTE)]}"/>')
    for j, outline in enumerate(outlines):
        ox, oy = to_xy(np.asarray(outline))
        path = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(ox, oy))
        parts.append(f'<polygon points="{path}" fill="none" stroke="{PALETTE[j % len(PALETTE)]}" '
                     f'stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
