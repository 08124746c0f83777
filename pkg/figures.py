"""
SVG figures of Omega(theta0) with the viscosity solution m0 and the
competitor m side by side. Output bytes depend only on theta0.
"""

import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from fields import GammaCurve, PiecewiseField, competitor_field, viscosity_field
from geometry import DomainSpec, build_domain, gamma_polyline

logger = logging.getLogger(__name__)

PREAMBLE = """\
<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.1f}" height="{height:.1f}" viewBox="{min_x:.4f} {min_y:.4f} {width:.4f} {height:.4f}">
<rect x="{min_x:.4f}" y="{min_y:.4f}" width="{width:.4f}" height="{height:.4f}" style="fill:#ffffff"/>
"""

POSTAMBLE = "</svg>\n"

PIXELS_PER_UNIT = 160.0
ARROW_LENGTH = 0.09
ARROW_SPACING = 0.16
RIDGE_OFFSET = 0.04
PANEL_GAP = 0.6


def _fmt(value: float) -> str:
    # avoid "-0.0000" so equal figures stay byte-identical
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


class SvgCanvas:
    """Accumulates SVG commands in world coordinates (y up) and tracks the drawn extent."""

    def __init__(self):
        self.min_x = None
        self.max_x = None
        self.min_y = None
        self.max_y = None
        self.commands: List[str] = []
        self.offset_x = 0.0

    def _map(self, x: float, y: float) -> Tuple[float, float]:
        sx = (x + self.offset_x) * PIXELS_PER_UNIT
        sy = -y * PIXELS_PER_UNIT
        if self.min_x is None:
            self.min_x = self.max_x = sx
            self.min_y = self.max_y = sy
        else:
            self.min_x, self.max_x = min(self.min_x, sx), max(self.max_x, sx)
            self.min_y, self.max_y = min(self.min_y, sy), max(self.max_y, sy)
        return sx, sy

    def _points(self, points: Iterable[Sequence[float]]) -> str:
        return " ".join(f"{_fmt(sx)},{_fmt(sy)}" for sx, sy in (self._map(x, y) for x, y in points))

    def polyline(self, points, color: str = "#000000", width: float = 1.5, dashed: bool = False):
        dash = ";stroke-dasharray:6,4" if dashed else ""
        self.commands.append(
            f'<polyline points="{self._points(points)}" style="fill:none;stroke:{color};stroke-width:{width}{dash}"/>'
        )

    def circle(self, x: float, y: float, radius: float, color: str = "#000000"):
        sx, sy = self._map(x, y)
        self.commands.append(
            f'<circle cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="{_fmt(radius * PIXELS_PER_UNIT)}" style="fill:{color};stroke:none"/>'
        )

    def arrow(self, x: float, y: float, dx: float, dy: float, color: str = "#1f4e9c"):
        tip = (x + dx, y + dy)
        back = 0.35 * math.hypot(dx, dy)
        angle = math.atan2(dy, dx)
        wings = [
            (tip[0] - back * math.cos(angle - 0.45), tip[1] - back * math.sin(angle - 0.45)),
            tip,
            (tip[0] - back * math.cos(angle + 0.45), tip[1] - back * math.sin(angle + 0.45)),
        ]
        self.polyline([(x, y), tip], color=color, width=1.0)
        self.polyline(wings, color=color, width=1.0)

    def text(self, x: float, y: float, text: str, color: str = "#444444", size: int = 14):
        sx, sy = self._map(x, y)
        self.commands.append(
            f'<text x="{_fmt(sx)}" y="{_fmt(sy)}" fill="{color}" font-size="{size}" font-family="sans-serif">{text}</text>'
        )

    def render(self) -> str:
        pad = 20.0
        min_x, min_y = self.min_x - pad, self.min_y - pad
        width = self.max_x - self.min_x + 2 * pad
        height = self.max_y - self.min_y + 2 * pad
        return PREAMBLE.format(min_x=min_x, min_y=min_y, width=width, height=height) + "".join(
            command + "\n" for command in self.commands
        ) + POSTAMBLE

    def save(self, path: Path) -> str:
        svg = self.render()
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(svg)
        return svg


def boundary_outline(domain: DomainSpec, arc_points: int = 181) -> np.ndarray:
    """Closed outline A -> large arc -> A' -> B -> A."""
    psi = np.linspace(domain.theta0, 2.0 * math.pi - domain.theta0, arc_points)
    arc = np.column_stack([np.cos(psi), np.sin(psi)])
    return np.vstack([arc, [domain.B], [domain.A]])


def arrow_samples(field: PiecewiseField, spacing: float = ARROW_SPACING, band: float = 0.03):
    """Field values on a square lattice, dropping points near curves or outside."""
    xmin, xmax, ymin, ymax = field.bounds
    xs = np.arange(xmin + spacing / 2, xmax, spacing)
    ys = np.arange(ymin + spacing / 2, ymax, spacing)
    grid_x, grid_y = np.meshgrid(xs, ys)
    points = np.column_stack([grid_x.ravel(), grid_y.ravel()])
    values, excluded = field.evaluate(points, band=band)
    return points[~excluded], values[~excluded]


def ridge_arrow_pairs(field: PiecewiseField, domain: DomainSpec, count: int = 5, offset: float = RIDGE_OFFSET):
    """Arrow pairs straddling [O, B] at x = k |OB| / (count + 1)."""
    xs = domain.len_OB * np.arange(1, count + 1) / (count + 1)
    above = np.column_stack([xs, np.full(count, offset)])
    below = np.column_stack([xs, np.full(count, -offset)])
    values_above, _ = field.evaluate(above, band=None)
    values_below, _ = field.evaluate(below, band=None)
    return list(zip(above, values_above, below, values_below))


def draw_panel(canvas: SvgCanvas, field: PiecewiseField, domain: DomainSpec, title: str, offset_x: float):
    canvas.offset_x = offset_x
    circle = np.linspace(0.0, 2.0 * math.pi, 241)
    canvas.polyline(np.column_stack([np.cos(circle), np.sin(circle)]), color="#999999", width=1.0, dashed=True)
    canvas.polyline(boundary_outline(domain), color="#000000", width=2.0)

    # gamma and [O, B] are drawn in both panels; the field's own jump curves in red on top
    canvas.polyline(gamma_polyline(domain.theta0, 120), color="#bbbbbb", width=1.0, dashed=True)
    canvas.polyline([domain.O, domain.B], color="#bbbbbb", width=1.0, dashed=True)
    for curve in field.jump_curves:
        if isinstance(curve, GammaCurve):
            points = gamma_polyline(domain.theta0, 120)
        else:
            points = curve.point(curve.parameters(121))
        canvas.polyline(points, color="#c0392b", width=2.0)

    points, values = arrow_samples(field)
    for (x, y), (mx, my) in zip(points, values):
        canvas.arrow(x, y, ARROW_LENGTH * mx, ARROW_LENGTH * my)
    for p_above, m_above, p_below, m_below in ridge_arrow_pairs(field, domain):
        canvas.arrow(p_above[0], p_above[1], ARROW_LENGTH * m_above[0], ARROW_LENGTH * m_above[1], color="#27ae60")
        canvas.arrow(p_below[0], p_below[1], ARROW_LENGTH * m_below[0], ARROW_LENGTH * m_below[1], color="#27ae60")

    landmarks = [
        ("O", domain.O),
        ("A", domain.A),
        ("A'", domain.A_prime),
        ("B", domain.B),
        ("I", domain.I_point),
    ]
    for label, (x, y) in landmarks:
        canvas.circle(x, y, 0.02)
        canvas.text(x + 0.03, y + 0.04, label)
    canvas.text(-1.0, 1.15, title, color="#000000", size=18)


def plot_fields(theta0: float, out: Optional[Path] = None) -> str:
    """Two panels: m0 on the left, m on the right. Returns the SVG text."""
    domain = build_domain(theta0)
    canvas = SvgCanvas()
    draw_panel(canvas, viscosity_field(theta0), domain, f"viscosity m0, theta0={theta0:.4f}", 0.0)
    draw_panel(
        canvas,
        competitor_field(theta0),
        domain,
        f"competitor m, theta0={theta0:.4f}",
        domain.len_OB + 1.0 + PANEL_GAP,
    )
    logger.debug(f"figure with {len(canvas.commands)} commands")
    if out is None:
        return canvas.render()
    return canvas.save(out)
