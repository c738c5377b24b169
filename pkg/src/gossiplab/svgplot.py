"""Tiny dependency-free SVG line charts for convergence curves.

Data emission is CSV-first; this writer exists so a sweep or trajectory
can be eyeballed without any plotting stack.  Axes are linear or log10,
ticks are chosen crudely, and that is the whole feature list.
"""
from __future__ import annotations

import math

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 16, 28, 44


def _transform(vals, log):
    out = []
    for v in vals:
        if log:
            out.append(math.log10(v) if v > 0 else None)
        else:
            out.append(float(v))
    return out


def line_chart(series, *, title="", xlabel="", ylabel="",
               log_x=False, log_y=False, width=640, height=420) -> str:
    """Render labeled (label, xs, ys) series to an SVG string."""
    if not series:
        raise ValueError("no series to plot")
    pts = []
    for _, xs, ys in series:
        if len(xs) != len(ys):
            raise ValueError("series length mismatch")
        txs = _transform(xs, log_x)
        tys = _transform(ys, log_y)
        pts.append([(a, b) for a, b in zip(txs, tys) if a is not None and b is not None])
    allx = [p[0] for curve in pts for p in curve]
    ally = [p[1] for curve in pts for p in curve]
    if not allx:
        raise ValueError("no finite points to plot")
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    iw = width - _MARGIN_L - _MARGIN_R
    ih = height - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + (x - x0) / (x1 - x0) * iw

    def py(y):
        return _MARGIN_T + ih - (y - y0) / (y1 - y0) * ih

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{iw}" height="{ih}" '
        'fill="none" stroke="#333"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">{title}</text>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        xl = f"1e{xv:.1f}" if log_x else f"{xv:.3g}"
        yl = f"1e{yv:.1f}" if log_y else f"{yv:.3g}"
        out.append(f'<line x1="{px(xv):.1f}" y1="{_MARGIN_T + ih}" x2="{px(xv):.1f}" '
                   f'y2="{_MARGIN_T + ih + 4}" stroke="#333"/>')
        out.append(f'<text x="{px(xv):.1f}" y="{_MARGIN_T + ih + 16}" '
                   f'text-anchor="middle">{xl}</text>')
        out.append(f'<line x1="{_MARGIN_L - 4}" y1="{py(yv):.1f}" x2="{_MARGIN_L}" '
                   f'y2="{py(yv):.1f}" stroke="#333"/>')
        out.append(f'<text x="{_MARGIN_L - 6}" y="{py(yv) + 3:.1f}" '
                   f'text-anchor="end">{yl}</text>')
    if xlabel:
        out.append(f'<text x="{_MARGIN_L + iw / 2:.1f}" y="{height - 8}" '
                   f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{_MARGIN_T + ih / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {_MARGIN_T + ih / 2:.1f})">{ylabel}</text>')
    for i, ((label, _, _), curve) in enumerate(zip(series, pts)):
        color = _PALETTE[i % len(_PALETTE)]
        if curve:
            path = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in curve)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                       'stroke-width="1.5"/>')
        lx = _MARGIN_L + iw - 8
        ly = _MARGIN_T + 14 + 14 * i
        out.append(f'<line x1="{lx - 30}" y1="{ly - 4}" x2="{lx - 10}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{lx - 34}" y="{ly}" text-anchor="end">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_chart(path, series, header_lines=(), **kwargs) -> None:
    """Write a chart; header lines become XML comments before the root."""
    with open(path, "w") as f:
        for ln in header_lines:
            f.write(f"<!-- {ln} -->\n")
        f.write(line_chart(series, **kwargs))
