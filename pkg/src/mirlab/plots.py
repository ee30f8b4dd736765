"""Deterministic SVG plots from CSV artifacts.

Hand-rolled SVG with a fixed canvas and formatted coordinates, so a
given CSV always produces a byte-identical file (diffable outputs, no
timestamps, no library-version drift).  Three kinds: line plots of
normalized-distance curves, training-loss curves, and a grouped success
bar chart (one group per domain).
"""

from __future__ import annotations

import csv
from typing import Dict, List, Sequence, Tuple

from .errors import ValidationError

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 20, 50
PLOT_W = WIDTH - MARGIN_L - MARGIN_R
PLOT_H = HEIGHT - MARGIN_T - MARGIN_B

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f")

PLOT_KINDS = ("reachability", "loss", "success")


def _f(v: float) -> str:
    return f"{v:.2f}"


def read_csv(path) -> Tuple[List[str], List[List[str]]]:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ValidationError(f"empty CSV: {path}")
    return rows[0], rows[1:]


def _require_columns(header: Sequence[str], needed: Sequence[str], kind: str):
    for col in needed:
        if col not in header:
            raise ValidationError(f"{kind} plot: CSV is missing column '{col}'")


def _axes(x_label: str, y_label: str, x_ticks, y_ticks,
          x_to_px, y_to_px) -> List[str]:
    parts = [
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + PLOT_H}" x2="{MARGIN_L + PLOT_W}" '
        f'y2="{MARGIN_T + PLOT_H}" stroke="#000000"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{MARGIN_T + PLOT_H}" stroke="#000000"/>',
    ]
    for tv in x_ticks:
        px = x_to_px(tv)
        parts.append(
            f'<line x1="{_f(px)}" y1="{MARGIN_T + PLOT_H}" x2="{_f(px)}" '
            f'y2="{MARGIN_T + PLOT_H + 5}" stroke="#000000"/>'
        )
        parts.append(
            f'<text x="{_f(px)}" y="{MARGIN_T + PLOT_H + 18}" font-size="11" '
            f'text-anchor="middle" font-family="monospace">{tv:g}</text>'
        )
    for tv in y_ticks:
        py = y_to_px(tv)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_f(py)}" x2="{MARGIN_L}" '
            f'y2="{_f(py)}" stroke="#000000"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_f(py + 4)}" font-size="11" '
            f'text-anchor="end" font-family="monospace">{tv:g}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_L + PLOT_W // 2}" y="{HEIGHT - 10}" font-size="12" '
        f'text-anchor="middle" font-family="monospace">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{MARGIN_T + PLOT_H // 2}" font-size="12" '
        f'text-anchor="middle" font-family="monospace" '
        f'transform="rotate(-90 14 {MARGIN_T + PLOT_H // 2})">{y_label}</text>'
    )
    return parts


def _ticks(lo: float, hi: float, n: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    span = hi - lo
    return [lo + span * i / (n - 1) for i in range(n)]


def _wrap(parts: List[str]) -> str:
    body = "\n".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n{body}\n</svg>\n'
    )


def _line_svg(header: List[str], rows: List[List[str]], kind: str) -> str:
    """First column is x; every remaining column is one curve."""
    if len(header) < 2:
        raise ValidationError(f"{kind} plot: need an x column plus >= 1 series")
    try:
        data = [[float(v) for v in row] for row in rows]
    except ValueError as e:
        raise ValidationError(f"{kind} plot: non-numeric cell ({e})")
    if not data:
        raise ValidationError(f"{kind} plot: CSV has no data rows")
    xs = [row[0] for row in data]
    ys = [row[1:] for row in data]
    x_lo, x_hi = min(xs), max(xs)
    flat = [v for row in ys for v in row]
    y_lo, y_hi = min(flat), max(flat)
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    def x_to_px(v):
        return MARGIN_L + (v - x_lo) / (x_hi - x_lo) * PLOT_W

    def y_to_px(v):
        return MARGIN_T + PLOT_H - (v - y_lo) / (y_hi - y_lo) * PLOT_H

    parts = _axes(header[0], kind, _ticks(x_lo, x_hi), _ticks(y_lo, y_hi),
                  x_to_px, y_to_px)
    for s, name in enumerate(header[1:]):
        pts = " ".join(
            f"{_f(x_to_px(x))},{_f(y_to_px(row[s]))}" for x, row in zip(xs, ys)
        )
        color = PALETTE[s % len(PALETTE)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(
            f'<text x="{MARGIN_L + PLOT_W - 6}" y="{MARGIN_T + 14 + 14 * s}" '
            f'font-size="11" text-anchor="end" font-family="monospace" '
            f'fill="{color}">{name}</text>'
        )
    return _wrap(parts)


def _success_svg(header: List[str], rows: List[List[str]]) -> str:
    """Grouped bars: one group per domain, one bar per method (lift rate,
    with a darker inner bar for the stack rate)."""
    _require_columns(header, ("method", "domain", "lift_rate", "stack_rate"),
                     "success")
    col = {name: header.index(name) for name in header}
    agg: Dict[Tuple[str, str], List[Tuple[float, float]]] = {}
    for row in rows:
        key = (row[col["domain"]], row[col["method"]])
        agg.setdefault(key, []).append(
            (float(row[col["lift_rate"]]), float(row[col["stack_rate"]]))
        )
    domains = sorted({d for d, _ in agg})
    methods = sorted({m for _, m in agg})

    def y_to_px(v):
        return MARGIN_T + PLOT_H - v * PLOT_H

    parts = _axes("domain", "success rate", [], [0.0, 0.25, 0.5, 0.75, 1.0],
                  lambda v: v, y_to_px)
    group_w = PLOT_W / max(len(domains), 1)
    bar_w = group_w * 0.8 / max(len(methods), 1)
    for gi, domain in enumerate(domains):
        gx = MARGIN_L + gi * group_w
        parts.append(
            f'<text x="{_f(gx + group_w / 2)}" y="{MARGIN_T + PLOT_H + 18}" '
            f'font-size="11" text-anchor="middle" '
            f'font-family="monospace">{domain}</text>'
        )
        for mi, method in enumerate(methods):
            if (domain, method) not in agg:
                continue
            vals = agg[(domain, method)]
            lift = sum(v[0] for v in vals) / len(vals)
            stack = sum(v[1] for v in vals) / len(vals)
            bx = gx + group_w * 0.1 + mi * bar_w
            color = PALETTE[mi % len(PALETTE)]
            parts.append(
                f'<rect x="{_f(bx)}" y="{_f(y_to_px(lift))}" '
                f'width="{_f(bar_w * 0.9)}" height="{_f(lift * PLOT_H)}" '
                f'fill="{color}" fill-opacity="0.45"/>'
            )
            parts.append(
                f'<rect x="{_f(bx)}" y="{_f(y_to_px(stack))}" '
                f'width="{_f(bar_w * 0.9)}" height="{_f(stack * PLOT_H)}" '
                f'fill="{color}"/>'
            )
    for mi, method in enumerate(methods):
        color = PALETTE[mi % len(PALETTE)]
        parts.append(
            f'<text x="{MARGIN_L + PLOT_W - 6}" y="{MARGIN_T + 14 + 14 * mi}" '
            f'font-size="11" text-anchor="end" font-family="monospace" '
            f'fill="{color}">{method}</text>'
        )
    return _wrap(parts)


def plot(csv_in, kind: str, svg_out) -> None:
    """Render one CSV to a deterministic SVG file."""
    if kind not in PLOT_KINDS:
        raise ValidationError(f"unknown plot kind '{kind}'; expected one of {PLOT_KINDS}")
    header, rows = read_csv(csv_in)
    if kind == "success":
        svg = _success_svg(header, rows)
    elif kind == "reachability":
        _require_columns(header, ("frame",), "reachability")
        svg = _line_svg(header, rows, "normalized distance")
    else:
        _require_columns(header, ("step",), "loss")
        svg = _line_svg(header, rows, "loss")
    with open(svg_out, "w") as f:
        f.write(svg)
