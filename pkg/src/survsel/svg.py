"""Minimal SVG line charts for proportion metrics (no plotting dependency)."""

from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT = 760, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 200, 40, 50

# colour-blind friendly cycle (Okabe-Ito plus greys)
PALETTE = ("#0072B2", "#E69F00", "#009E73", "#D55E00", "#CC79A7",
           "#56B4E9", "#F0E442", "#000000", "#999999", "#7F3C8D")


def _fmt(v):
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _nice_ticks(lo, hi, count=6):
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_chart(series, title="", x_label="", y_label="", y_range=(0.0, 1.0)):
    """Render ``series`` (``{label: [(x, y), ...]}``) as an SVG document string.

    Points are drawn as markers; a polyline joins them only when a series has
    at least two points.  The y axis is fixed to ``y_range``.
    """
    xs = [x for pts in series.values() for x, _ in pts]
    if not xs:
        raise ValueError("no data to plot")
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    pad = 0.04 * (x_hi - x_lo)
    x_lo, x_hi = x_lo - pad, x_hi + pad
    y_lo, y_hi = y_range
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        y = min(max(y, y_lo), y_hi)
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">'
                   f'{escape(title)}</text>')

    # axes and grid
    x0, x1 = MARGIN_L, MARGIN_L + plot_w
    y0, y1 = MARGIN_T + plot_h, MARGIN_T
    for t in _nice_ticks(y_lo, y_hi):
        out.append(f'<line x1="{x0}" y1="{py(t):.1f}" x2="{x1}" y2="{py(t):.1f}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{x0 - 6}" y="{py(t) + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    for t in sorted(set(xs)):
        out.append(f'<line x1="{px(t):.1f}" y1="{y0}" x2="{px(t):.1f}" y2="{y0 + 5}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{px(t):.1f}" y="{y0 + 18}" text-anchor="middle">{t:g}</text>')
    out.append(f'<polyline points="{x0},{y1} {x0},{y0} {x1},{y0}" fill="none" stroke="black"/>')
    if x_label:
        out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">'
                   f'{escape(x_label)}</text>')
    if y_label:
        cy = (y0 + y1) / 2
        out.append(f'<text x="16" y="{cy:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {cy:.1f})">{escape(y_label)}</text>')

    for i, (label, pts) in enumerate(series.items()):
        colour = PALETTE[i % len(PALETTE)]
        pts = sorted(pts)
        coords = [(px(x), py(y)) for x, y in pts]
        group = [f'<g class="series" data-label="{escape(str(label))}">']
        if len(coords) >= 2:
            joined = " ".join(f"{a:.1f},{b:.1f}" for a, b in coords)
            group.append(f'<polyline points="{joined}" fill="none" stroke="{colour}" '
                         f'stroke-width="2"/>')
        for a, b in coords:
            group.append(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="3.5" fill="{colour}"/>')
        group.append("</g>")
        out.extend(group)
        ly = MARGIN_T + 10 + 20 * i
        lx = x1 + 20
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{colour}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
