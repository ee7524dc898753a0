"""CSV, JSON and SVG writers with deterministic output."""

from __future__ import annotations

import json
import math
import os

import numpy as np


def fmt(value):
    """17 significant digits for floats; integers and strings verbatim."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def csv_text(header, columns):
    """CSV from a header and equally long columns."""
    rows = [",".join(header)]
    n = len(columns[0]) if columns else 0
    if any(len(c) != n for c in columns):
        raise ValueError("columns differ in length")
    for i in range(n):
        rows.append(",".join(fmt(c[i]) for c in columns))
    return "\n".join(rows) + "\n"


def write_text(path, text):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def write_csv(path, header, columns):
    return write_text(path, csv_text(header, columns))


def write_json(path, reports):
    payload = [r.to_json() for r in reports]
    return write_text(path, json.dumps(payload, indent=2, sort_keys=False) + "\n")


def _ticks(lo, hi, log):
    if log:
        return [10.0**e for e in range(math.floor(lo), math.ceil(hi) + 1)]
    step = 10 ** math.floor(math.log10((hi - lo) or 1.0))
    first = math.ceil(lo / step) * step
    return list(np.arange(first, hi + step / 2, step))


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f", "#bcbd22")


def svg_lines(series, title="", xlabel="x", ylabel="y", logx=True, logy=False, width=640, height=400):
    """Line chart as SVG text.  ``series`` maps label -> (x, y)."""
    left, right, top, bottom = 70, 150, 30, 50
    pw, ph = width - left - right, height - top - bottom
    tx = (lambda v: np.log10(v)) if logx else (lambda v: np.asarray(v, dtype=float))
    ty = (lambda v: np.log10(v)) if logy else (lambda v: np.asarray(v, dtype=float))
    pts = []
    for label, (x, y) in series.items():
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y) & ((x > 0) if logx else True) & ((y > 0) if logy else True)
        pts.append((label, tx(x[ok]), ty(y[ok])))
    allx = np.concatenate([p[1] for p in pts]) if pts else np.array([0.0, 1.0])
    ally = np.concatenate([p[2] for p in pts]) if pts else np.array([0.0, 1.0])
    x0, x1 = (float(allx.min()), float(allx.max())) if allx.size else (0.0, 1.0)
    y0, y1 = (float(ally.min()), float(ally.max())) if ally.size else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    sx = lambda v: left + (v - x0) / (x1 - x0) * pw
    sy = lambda v: top + ph - (v - y0) / (y1 - y0) * ph
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{_esc(title)}</text>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for v in _ticks(x0, x1, False):
        if x0 <= v <= x1:
            lab = f"1e{v:g}" if logx else f"{v:g}"
            out.append(f'<text x="{sx(v):.2f}" y="{top + ph + 15}" text-anchor="middle">{lab}</text>')
    for v in _ticks(y0, y1, False):
        if y0 <= v <= y1:
            lab = f"1e{v:g}" if logy else f"{v:.3g}"
            out.append(f'<text x="{left - 5}" y="{sy(v) + 4:.2f}" text-anchor="end">{lab}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + ph / 2:.1f})">{_esc(ylabel)}</text>')
    for i, (label, x, y) in enumerate(pts):
        color = PALETTE[i % len(PALETTE)]
        if x.size:
            path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        ly = top + 14 * (i + 1)
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(text):
    return str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_svg(path, series, **kw):
    return write_text(path, svg_lines(series, **kw))
