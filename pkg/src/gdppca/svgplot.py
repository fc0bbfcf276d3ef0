"""Native SVG line charts for harness result files.

No plotting dependency: the renderer emits a fixed-layout SVG string with
all coordinates formatted to two decimals, so identical inputs produce
identical bytes.  Panels are laid out per (model, dimension) pair, one
line per method, mean loss on the y axis and sample size (or the privacy
parameter, when the file sweeps it) on the x axis.
"""

from __future__ import annotations

import math

from . import harness

_COLORS = {
    "g_sph": "#1f77b4",
    "g_wins": "#ff7f0e",
    "AG": "#2ca02c",
    "SGPCA": "#d62728",
    "NSGGD": "#9467bd",
    "kendall_sph": "#1f77b4",
    "kendall_wins": "#ff7f0e",
    "paired_sph": "#2ca02c",
    "paired_wins": "#d62728",
}

_PANEL_W = 360
_PANEL_H = 300
_MARGIN = {"left": 52, "right": 16, "top": 34, "bottom": 74}
_PER_ROW = 3


def _fmt(x):
    return f"{x:.2f}"


def _tick_values(top):
    """Five round-ish y ticks from 0 to a value covering top."""
    if top <= 0:
        return [0.0, 1.0]
    raw = top / 4.0
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    k = int(math.ceil(top / step))
    return [i * step for i in range(k + 1)]


def _method_order(methods):
    order = {name: i for i, name in enumerate(harness.METHODS)}
    return sorted(methods, key=lambda name: order.get(name, len(order)))


def render_svg(rows, loss=None):
    """Render harness rows to an SVG document string.

    loss: "sin_theta", "proj_frob", or None to choose automatically
    (proj_frob when every row is non-private, the toy-comparison
    convention; sin_theta otherwise).
    """
    if not rows:
        raise ValueError("no data rows to plot")
    if loss is None:
        loss = "proj_frob" if all(math.isinf(r.epsilon) for r in rows) else "sin_theta"
    if loss not in ("sin_theta", "proj_frob"):
        raise ValueError(f"loss must be 'sin_theta' or 'proj_frob', got {loss!r}")
    mean_field = "sin_mean" if loss == "sin_theta" else "frob_mean"

    finite_eps = sorted({r.epsilon for r in rows if math.isfinite(r.epsilon)})
    x_is_eps = len(finite_eps) > 1
    x_field = "epsilon" if x_is_eps else "n"
    x_label = "epsilon" if x_is_eps else "n"

    summaries = harness.summarize(rows)
    if x_is_eps:
        summaries = [s for s in summaries if math.isfinite(s.epsilon)]
    usable = [s for s in summaries if s.reps > 0]
    if not usable:
        raise ValueError("every row is an error row; nothing to plot")

    panels: dict = {}
    for s in usable:
        panels.setdefault((s.model, s.d), []).append(s)
    panel_keys = sorted(panels)

    ncol = min(_PER_ROW, len(panel_keys))
    nrow = (len(panel_keys) + _PER_ROW - 1) // _PER_ROW
    width = ncol * _PANEL_W
    height = nrow * _PANEL_H

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" '
        f'font-family="Helvetica, Arial, sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]

    for idx, key in enumerate(panel_keys):
        model, d = key
        cell = panels[key]
        px = (idx % _PER_ROW) * _PANEL_W
        py = (idx // _PER_ROW) * _PANEL_H
        x0 = px + _MARGIN["left"]
        y0 = py + _MARGIN["top"]
        iw = _PANEL_W - _MARGIN["left"] - _MARGIN["right"]
        ih = _PANEL_H - _MARGIN["top"] - _MARGIN["bottom"]

        xs = sorted({getattr(s, x_field) for s in cell})
        ymax_data = max(getattr(s, mean_field) for s in cell)
        ticks = _tick_values(ymax_data * 1.05)
        ymax = ticks[-1]
        xmin, xmax = xs[0], xs[-1]
        span = (xmax - xmin) or 1.0

        def sx(v):
            return x0 + (v - xmin) / span * iw

        def sy(v):
            return y0 + ih - (v / ymax) * ih

        parts.append(f'<text x="{_fmt(x0 + iw / 2)}" y="{_fmt(py + 20)}" '
                     f'text-anchor="middle" font-size="13">{model}, d={d}</text>')
        parts.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(iw)}" '
                     f'height="{_fmt(ih)}" fill="none" stroke="#999" stroke-width="1"/>')
        for tv in ticks:
            yy = sy(tv)
            parts.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(yy)}" x2="{_fmt(x0 + iw)}" '
                         f'y2="{_fmt(yy)}" stroke="#eee" stroke-width="1"/>')
            parts.append(f'<text x="{_fmt(x0 - 6)}" y="{_fmt(yy + 3.5)}" '
                         f'text-anchor="end" font-size="10">{tv:g}</text>')
        for xv in xs:
            xx = sx(xv)
            parts.append(f'<line x1="{_fmt(xx)}" y1="{_fmt(y0 + ih)}" x2="{_fmt(xx)}" '
                         f'y2="{_fmt(y0 + ih + 4)}" stroke="#999" stroke-width="1"/>')
            parts.append(f'<text x="{_fmt(xx)}" y="{_fmt(y0 + ih + 16)}" '
                         f'text-anchor="middle" font-size="10">{xv:g}</text>')
        parts.append(f'<text x="{_fmt(x0 + iw / 2)}" y="{_fmt(y0 + ih + 30)}" '
                     f'text-anchor="middle" font-size="11">{x_label}</text>')
        parts.append(f'<text x="{_fmt(px + 14)}" y="{_fmt(y0 + ih / 2)}" '
                     f'text-anchor="middle" font-size="11" '
                     f'transform="rotate(-90 {_fmt(px + 14)} {_fmt(y0 + ih / 2)})">'
                     f'{loss}</text>')

        methods = _method_order({s.method for s in cell})
        for mi, method in enumerate(methods):
            pts = sorted((getattr(s, x_field), getattr(s, mean_field))
                         for s in cell if s.method == method)
            if not pts:
                continue
            color = _COLORS.get(method, "#000000")
            path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
            parts.append(f'<polyline points="{path}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
            for x, y in pts:
                parts.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" '
                             f'r="2.5" fill="{color}"/>')
            lx = x0 + 8 + (mi % 3) * ((iw - 8) / 3)
            ly = y0 + ih + 44 + (mi // 3) * 14
            parts.append(f'<line x1="{_fmt(lx)}" y1="{_fmt(ly - 3)}" '
                         f'x2="{_fmt(lx + 14)}" y2="{_fmt(ly - 3)}" '
                         f'stroke="{color}" stroke-width="2"/>')
            parts.append(f'<text x="{_fmt(lx + 18)}" y="{_fmt(ly)}" '
                         f'font-size="10">{method}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_csv(in_path, out_path, loss=None):
    """Read a harness CSV and write the chart; returns the panel count."""
    rows = harness.read_csv(in_path)
    svg = render_svg(rows, loss)
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        f.write(svg)
    return svg.count("<rect x=")
