from __future__ import annotations

import math
from typing import List, Sequence, Tuple

import numpy as np

from hyperdomain.domain import DomainSpec, FactorDomain

PREAMBLE = """\
<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="%(width)s" height="%(height)s" viewBox="0 0 %(width)s %(height)s">
<title>%(title)s</title>
<defs><clipPath id="plot"><rect x="%(margin)s" y="%(margin)s" width="%(inner_w)s" height="%(inner_h)s"/></clipPath></defs>
<rect x="0" y="0" width="%(width)s" height="%(height)s" style="fill:#ffffff"/>
<rect class="frame" x="%(margin)s" y="%(margin)s" width="%(inner_w)s" height="%(inner_h)s" style="fill:none;stroke:#000000;stroke-width:1"/>
<g clip-path="url(#plot)">
"""

MIDAMBLE = """\
</g>
"""

POSTAMBLE = """\
</svg>
"""

WIDTH = 640
HEIGHT = 480
MARGIN = 48
BRANCH_SAMPLES = 256
REGION_SAMPLES = 256


def fmt(v: float) -> str:
    s = format(float(v), ".6g")
    return "0" if s == "-0" else s


Window = Tuple[float, float, float, float]


class Canvas:
    """World-to-screen mapping plus an ordered list of SVG elements."""

    def __init__(self, window: Window):
        xmin, xmax, ymin, ymax = window
        if not (xmin < xmax and ymin < ymax):
            raise ValueError(f"window must satisfy xmin < xmax and ymin < ymax, got {window}")
        self.window = window
        self.clipped: List[str] = []
        self.overlay: List[str] = []

    def sx(self, x: float) -> float:
        xmin, xmax, _, _ = self.window
        return MARGIN + (x - xmin) / (xmax - xmin) * (WIDTH - 2 * MARGIN)

    def sy(self, y: float) -> float:
        _, _, ymin, ymax = self.window
        return HEIGHT - MARGIN - (y - ymin) / (ymax - ymin) * (HEIGHT - 2 * MARGIN)

    def _points(self, pts: Sequence[Tuple[float, float]]) -> str:
        return " ".join(f"{fmt(self.sx(x))},{fmt(self.sy(y))}" for x, y in pts)

    def polygon(self, pts, cls: str, style: str) -> None:
        self.clipped.append(f'<polygon class="{cls}" points="{self._points(pts)}" style="{style}"/>')

    def polyline(self, pts, cls: str, style: str) -> None:
        self.clipped.append(f'<polyline class="{cls}" points="{self._points(pts)}" style="{style}"/>')

    def line(self, p0, p1, cls: str, style: str) -> None:
        self.clipped.append(
            f'<line class="{cls}" x1="{fmt(self.sx(p0[0]))}" y1="{fmt(self.sy(p0[1]))}" '
            f'x2="{fmt(self.sx(p1[0]))}" y2="{fmt(self.sy(p1[1]))}" style="{style}"/>'
        )

    def tick(self, x: float) -> None:
        sx, base = fmt(self.sx(x)), HEIGHT - MARGIN
        self.overlay.append(
            f'<line class="tick" x1="{sx}" y1="{fmt(base)}" x2="{sx}" y2="{fmt(base + 6)}" style="stroke:#000000;stroke-width:1"/>'
        )

    def circle(self, x: float, y: float, r: float, cls: str, style: str) -> None:
        self.clipped.append(f'<circle class="{cls}" cx="{fmt(self.sx(x))}" cy="{fmt(self.sy(y))}" r="{fmt(r)}" style="{style}"/>')

    def text(self, x: float, y: float, label: str, cls: str) -> None:
        self.overlay.append(
            f'<text class="{cls}" x="{fmt(x)}" y="{fmt(y)}" text-anchor="middle" style="font-family:sans-serif;font-size:11px">{label}</text>'
        )

    def render(self, title: str) -> str:
        width, height, margin = WIDTH, HEIGHT, MARGIN
        inner_w, inner_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
        head = PREAMBLE % dict(width=width, height=height, margin=margin, inner_w=inner_w, inner_h=inner_h, title=title)
        return head + "".join(e + "\n" for e in self.clipped) + MIDAMBLE + "".join(e + "\n" for e in self.overlay) + POSTAMBLE


def default_window(d: DomainSpec, f: FactorDomain) -> Window:
    span = d.span
    reach = max([f.rho] + [abs(c.xv) for c in f.corners])
    return (d.t[0] - 0.25 * span, d.t[-1] + 0.25 * span, -3.0 * reach, 3.0 * reach)


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    out, start = [], None
    for i, ok in enumerate(mask):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            out.append((start, i))
            start = None
    if start is not None:
        out.append((start, len(mask)))
    return out


def render_factor_svg(d: DomainSpec, index: int, window: Window | None = None) -> str:
    """Picture of one factor domain in its plane (x1, x_v).

    Drawn in order: shaded slice region, dashed asymptotes, branch curves,
    corner markers, then ticks at every t_j outside the clip region.
    """
    if not 0 <= index < len(d.factors):
        raise IndexError(f"factor index {index} out of range 0..{len(d.factors) - 1}")
    f = d.factors[index]
    window = default_window(d, f) if window is None else tuple(float(w) for w in window)
    canvas = Canvas(window)
    xmin, xmax, ymin, ymax = window
    height = ymax - ymin

    xs = np.linspace(xmin, xmax, REGION_SAMPLES)
    lo, hi = f.envelopes(xs)
    ok = lo < hi
    for a, b in _runs(ok):
        top = np.clip(hi[a:b], ymin - height, ymax + height)
        bottom = np.clip(lo[a:b], ymin - height, ymax + height)
        pts = list(zip(xs[a:b], top)) + list(zip(xs[a:b][::-1], bottom[::-1]))
        canvas.polygon(pts, "region", "fill:#9ecae1;fill-opacity:0.5;stroke:none")

    seen_x, seen_y = set(), set()
    dash = "stroke:#888888;stroke-width:0.75;stroke-dasharray:4,3"
    for h in f.hypersurfaces:
        a, b = h.branch.a, h.branch.b
        if xmin < a < xmax and a not in seen_x:
            seen_x.add(a)
            canvas.line((a, ymin), (a, ymax), "asymptote", dash)
        if ymin < b < ymax and b not in seen_y:
            seen_y.add(b)
            canvas.line((xmin, b), (xmax, b), "asymptote", dash)

    for h in f.hypersurfaces:
        sup_lo, sup_hi = h.branch.support
        nudge = 1e-3 * (xmax - xmin)
        u0 = max(xmin, sup_lo + nudge) if math.isfinite(sup_lo) else xmin
        u1 = min(xmax, sup_hi - nudge) if math.isfinite(sup_hi) else xmax
        if not u0 < u1:
            continue
        us = np.linspace(u0, u1, BRANCH_SAMPLES)
        vs = h.branch.heights(us)
        keep = (vs >= ymin - height) & (vs <= ymax + height)
        if keep.sum() < 2:
            continue
        color = "#d62728" if h.bound == "lower" else "#1f77b4"
        canvas.polyline(list(zip(us[keep], vs[keep])), "branch", f"fill:none;stroke:{color};stroke-width:1.5")

    for c in f.corners:
        canvas.circle(c.x1, c.xv, 4, "corner", "fill:#000000;stroke:none")

    for j, t in enumerate(d.t):
        if xmin <= t <= xmax:
            canvas.tick(t)
            canvas.text(canvas.sx(t), HEIGHT - MARGIN + 18, f"t{j + 1}", "tick-label")

    title = f"{f.kind} factor in plane (x1, x{f.v})"
    return canvas.render(title)
