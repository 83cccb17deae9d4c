"""Hand-rolled SVG rendering of evaluation reports (no plotting dependency).

One figure: the four subset distance histograms overlaid as step curves,
axes with ticks, a legend, and the two overlap errors printed in the corner.
Output is a plain SVG 1.1 string, byte-identical for identical reports.
"""

from __future__ import annotations

from .evaluation import EvalReport
from .pairing import SUBSET_NAMES

WIDTH, HEIGHT = 720, 460
MARGIN_LEFT, MARGIN_RIGHT = 70, 160
MARGIN_TOP, MARGIN_BOTTOM = 50, 60

COLORS = {
    "rel_near": "#1f77b4",
    "rel_far": "#2ca02c",
    "irr_near": "#d62728",
    "irr_far": "#ff7f0e",
}
LABELS = {
    "rel_near": "Rel-Near",
    "rel_far": "Rel-Far",
    "irr_near": "Irr-Near",
    "irr_far": "Irr-Far",
}


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def render_report(report: EvalReport, title: str = "Distance distributions") -> str:
    lo, hi = report.hist_range
    plot_l, plot_r = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    plot_t, plot_b = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM
    ymax = max(max(h.max() for h in report.hist.values()), 1e-12) * 1.08

    def x_px(x: float) -> float:
        return plot_l + (x - lo) / (hi - lo) * (plot_r - plot_l)

    def y_px(y: float) -> float:
        return plot_b - y / ymax * (plot_b - plot_t)

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    out.append('<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>')
    out.append(
        f'<text x="{(plot_l + plot_r) / 2:.1f}" y="28" text-anchor="middle" '
        f'font-size="17" font-family="Helvetica">{_esc(title)}</text>'
    )
    # axes
    out.append(
        f'<line x1="{plot_l}" y1="{plot_b}" x2="{plot_r}" y2="{plot_b}" stroke="#000" stroke-width="1.5"/>'
    )
    out.append(
        f'<line x1="{plot_l}" y1="{plot_t}" x2="{plot_l}" y2="{plot_b}" stroke="#000" stroke-width="1.5"/>'
    )
    for i in range(6):
        xv = lo + (hi - lo) * i / 5
        xp = x_px(xv)
        out.append(f'<line x1="{xp:.2f}" y1="{plot_b}" x2="{xp:.2f}" y2="{plot_b + 5}" stroke="#000"/>')
        out.append(
            f'<text x="{xp:.2f}" y="{plot_b + 20}" text-anchor="middle" font-size="11" '
            f'font-family="Helvetica">{xv:.3g}</text>'
        )
    for i in range(5):
        yv = ymax * i / 4
        yp = y_px(yv)
        out.append(f'<line x1="{plot_l - 5}" y1="{yp:.2f}" x2="{plot_l}" y2="{yp:.2f}" stroke="#000"/>')
        out.append(
            f'<text x="{plot_l - 9}" y="{yp + 4:.2f}" text-anchor="end" font-size="11" '
            f'font-family="Helvetica">{yv:.3g}</text>'
        )
    out.append(
        f'<text x="{(plot_l + plot_r) / 2:.1f}" y="{HEIGHT - 18}" text-anchor="middle" '
        f'font-size="13" font-family="Helvetica">Euclidean distance</text>'
    )
    out.append(
        f'<text x="20" y="{(plot_t + plot_b) / 2:.1f}" text-anchor="middle" font-size="13" '
        f'font-family="Helvetica" transform="rotate(-90 20 {(plot_t + plot_b) / 2:.1f})">fraction of pairs</text>'
    )
    # step histograms
    binw = (hi - lo) / report.bins
    for name in SUBSET_NAMES:
        h = report.hist[name]
        pts = [f"{x_px(lo):.2f},{y_px(0.0):.2f}"]
        for b, v in enumerate(h):
            x0, x1 = lo + b * binw, lo + (b + 1) * binw
            pts.append(f"{x_px(x0):.2f},{y_px(float(v)):.2f}")
            pts.append(f"{x_px(x1):.2f},{y_px(float(v)):.2f}")
        pts.append(f"{x_px(hi):.2f},{y_px(0.0):.2f}")
        out.append(
            f'<polyline fill="none" stroke="{COLORS[name]}" stroke-width="1.8" points="{" ".join(pts)}"/>'
        )
    # legend and error annotations
    lx, ly = plot_r + 18, plot_t + 10
    for i, name in enumerate(SUBSET_NAMES):
        yy = ly + i * 22
        out.append(
            f'<line x1="{lx}" y1="{yy}" x2="{lx + 24}" y2="{yy}" stroke="{COLORS[name]}" stroke-width="3"/>'
        )
        out.append(
            f'<text x="{lx + 30}" y="{yy + 4}" font-size="12" font-family="Helvetica">{LABELS[name]}</text>'
        )
    anno = [
        f"Err (Rel vs Irr) = {report.err_rel_irr:.4f}",
        f"Err (RFar vs INear) = {report.err_rfar_inear:.4f}",
    ]
    if report.matching is not None:
        anno.append(f"closest-{report.matching.m} precision = {report.matching.precision:.4f}")
    for i, text in enumerate(anno):
        out.append(
            f'<text x="{lx}" y="{ly + 110 + i * 18}" font-size="12" '
            f'font-family="Helvetica">{_esc(text)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
