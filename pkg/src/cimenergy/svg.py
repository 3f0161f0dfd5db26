"""Minimal static SVG charts built from summary CSV files.

Both chart functions take only a CSV path and column names, so any figure
can be regenerated offline from the CSV alone.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import ParseError
from .report import read_csv

W, H = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 30, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _col(header, name, path):
    try:
        return header.index(name)
    except ValueError:
        raise ParseError(f"column {name!r} not in {header}", str(path)) from None


def _num(v):
    return f"{v:.2f}"


def _frame(title, xlabel, ylabel):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.0f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{LEFT + (W - LEFT - RIGHT) / 2:.0f}" y="{H - 10}" '
        f'text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{TOP + (H - TOP - BOTTOM) / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {TOP + (H - TOP - BOTTOM) / 2:.0f})">{escape(ylabel)}</text>',
        f'<line x1="{LEFT}" y1="{H - BOTTOM}" x2="{W - RIGHT}" y2="{H - BOTTOM}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{H - BOTTOM}" stroke="black"/>',
    ]


def _legend(names):
    out = []
    for i, name in enumerate(names):
        y = TOP + 14 * i
        colour = PALETTE[i % len(PALETTE)]
        out.append(f'<rect x="{W - RIGHT + 10}" y="{y}" width="10" height="10" fill="{colour}"/>')
        out.append(f'<text x="{W - RIGHT + 24}" y="{y + 9}">{escape(name)}</text>')
    return out


def line_chart(csv_path, x, y, series=None, title="", log_y=True, xlabel=None, ylabel=None):
    """Lines of ``y`` against ``x`` (log axes), one per distinct ``series`` value.

    ``y`` may be a list of columns, each drawn as its own line.
    """
    _, header, rows = read_csv(csv_path)
    ys = [y] if isinstance(y, str) else list(y)
    ix = _col(header, x, csv_path)
    iys = [_col(header, c, csv_path) for c in ys]
    iser = _col(header, series, csv_path) if series else None

    lines = {}
    for row in rows:
        for c, iy in zip(ys, iys):
            key = row[iser] if iser is not None else c
            if iser is not None and len(ys) > 1:
                key = f"{row[iser]} {c}"
            xv, yv = float(row[ix]), float(row[iy])
            if xv > 0 and (yv > 0 or not log_y) and math.isfinite(yv):
                lines.setdefault(key, []).append((xv, yv))
    if not lines:
        raise ParseError("nothing to plot", str(csv_path))

    xs = [p[0] for pts in lines.values() for p in pts]
    yv = [p[1] for pts in lines.values() for p in pts]
    tx = _axis(min(xs), max(xs), True, LEFT, W - RIGHT, invert=True)
    ty = _axis(min(yv), max(yv), log_y, H - BOTTOM, TOP)

    out = _frame(title, xlabel or x, ylabel or ", ".join(ys))
    out += _ticks(min(xs), max(xs), True, tx, "x", sorted(set(xs)) if len(set(xs)) <= 12 else None)
    out += _ticks(min(yv), max(yv), log_y, ty, "y")
    for i, (name, pts) in enumerate(lines.items()):
        pts = sorted(pts, reverse=True)
        path = " ".join(f"{_num(tx(a))},{_num(ty(b))}" for a, b in pts)
        colour = PALETTE[i % len(PALETTE)]
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{path}"/>')
        out += [f'<circle cx="{_num(tx(a))}" cy="{_num(ty(b))}" r="2.5" fill="{colour}"/>'
                for a, b in pts]
    out += _legend(list(lines))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def stacked_bar_chart(csv_path, category, parts, title="", ylabel="pJ/MAC"):
    """One bar per row, stacked from the ``parts`` columns (linear axis)."""
    _, header, rows = read_csv(csv_path)
    ic = _col(header, category, csv_path)
    ips = [_col(header, p, csv_path) for p in parts]
    if not rows:
        raise ParseError("nothing to plot", str(csv_path))
    stacks = [(row[ic], [max(float(row[i]), 0.0) for i in ips]) for row in rows]
    top = max(sum(v) for _, v in stacks) or 1.0
    ty = _axis(0.0, top, False, H - BOTTOM, TOP)
    span = (W - LEFT - RIGHT) / len(stacks)
    bar = span * 0.6

    out = _frame(title, category, ylabel)
    out += _ticks(0.0, top, False, ty, "y")
    for k, (label, values) in enumerate(stacks):
        x0 = LEFT + span * k + (span - bar) / 2
        base = 0.0
        for i, v in enumerate(values):
            y1, y0 = ty(base + v), ty(base)
            out.append(f'<rect x="{_num(x0)}" y="{_num(y1)}" width="{_num(bar)}" '
                       f'height="{_num(y0 - y1)}" fill="{PALETTE[i % len(PALETTE)]}"/>')
            base += v
        out.append(f'<text x="{_num(x0 + bar / 2)}" y="{H - BOTTOM + 14}" '
                   f'text-anchor="middle">{escape(label)}</text>')
    out += _legend(parts)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _axis(lo, hi, log, p0, p1, invert=False):
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    if invert:
        p0, p1 = p1, p0

    def t(v):
        v = math.log10(v) if log else v
        return p0 + (v - lo) / (hi - lo) * (p1 - p0)
    return t


def _ticks(lo, hi, log, t, axis, vals=None):
    if vals is None and log:
        vals = [10.0**e for e in range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1)]
        vals = [v for v in vals if lo <= v <= hi] or [lo, hi]
    elif vals is None:
        vals = [lo + (hi - lo) * i / 4 for i in range(5)]
    out = []
    for v in vals:
        p = t(v)
        label = f"{v:g}"
        if axis == "x":
            out.append(f'<text x="{_num(p)}" y="{H - BOTTOM + 14}" text-anchor="middle">{label}</text>')
        else:
            out.append(f'<line x1="{LEFT - 4}" y1="{_num(p)}" x2="{LEFT}" y2="{_num(p)}" stroke="black"/>')
            out.append(f'<text x="{LEFT - 6}" y="{_num(p + 4)}" text-anchor="end">{label}</text>')
    return out


def write_svg(path, text):
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
