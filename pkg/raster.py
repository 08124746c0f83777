"""
Numerical oracles that only use field evaluation and curve parametrizations:
raster sampling, unit-norm and flux (weak divergence) certificates, L1
distances, trace checks, and a polygonal line-energy estimator that never
touches the closed-form line elements or jump sizes.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from constants import (
    CURVE_BAND,
    DEFAULT_SIDE_OFFSET,
    GAUSS_LEGENDRE_ORDER,
    RASTER_CSV_HEADER,
    CertificateStatus,
)
from costfn import JumpCost
from energy import EnergyBreakdown
from errors import DomainError, RepositionError
from fields import PiecewiseField
from geometry import DomainSpec
from util import write_csv_rows

logger = logging.getLogger(__name__)

Bounds = Tuple[float, float, float, float]

FLUX_SAMPLES_PER_EDGE = 256
# panels are kept short next to the 1/r formulas; rectangles stay RECTANGLE_CLEARANCE away from O
FLUX_MAX_PANEL = 0.05
BREAKPOINT_TOL = 1e-15
MAX_BREAKPOINT_STEPS = 120
RECTANGLE_CLEARANCE = 0.05
MIN_RECTANGLE_SIZE = 0.02
MIN_SIDE_OFFSET = 1e-10


@dataclass
class RasterGrid:
    bounds: Bounds
    nx: int
    ny: int
    samples: np.ndarray  # (ny, nx, 2), NaN where masked
    mask: np.ndarray  # (ny, nx)

    @property
    def cell_area(self) -> float:
        xmin, xmax, ymin, ymax = self.bounds
        return (xmax - xmin) * (ymax - ymin) / (self.nx * self.ny)

    @property
    def mask_fraction(self) -> float:
        return float(np.mean(self.mask))

    def centers(self) -> Tuple[np.ndarray, np.ndarray]:
        return cell_centers(self.bounds, self.nx, self.ny)

    def unit_norm_deviation(self) -> float:
        """max | |m| - 1 | over unmasked cells."""
        norms = np.linalg.norm(self.samples[~self.mask], axis=1)
        if norms.size == 0:
            return 0.0
        return float(np.max(np.abs(norms - 1.0)))

    def to_csv(self, path: Path) -> None:
        xs, ys = self.centers()
        rows = (
            [float(x), float(y), float(m[0]), float(m[1]), int(masked)]
            for x, y, m, masked in zip(
                xs.ravel(), ys.ravel(), self.samples.reshape(-1, 2), self.mask.ravel()
            )
        )
        write_csv_rows(RASTER_CSV_HEADER, rows, out=path)


def cell_centers(bounds: Bounds, nx: int, ny: int) -> Tuple[np.ndarray, np.ndarray]:
    xmin, xmax, ymin, ymax = bounds
    xs = xmin + (np.arange(nx) + 0.5) * (xmax - xmin) / nx
    ys = ymin + (np.arange(ny) + 0.5) * (ymax - ymin) / ny
    return np.meshgrid(xs, ys)


def _check_resolution(nx: int, ny: int) -> None:
    if nx < 2 or ny < 2:
        raise DomainError(f"raster needs nx, ny >= 2, got {nx}x{ny}")


def sample_field(
    field: PiecewiseField,
    bounds: Optional[Bounds] = None,
    nx: int = 256,
    ny: int = 256,
    exclusion_band: float = CURVE_BAND,
) -> RasterGrid:
    """Midpoint sampling; cells outside the domain or within the band of a curve or singular point are masked."""
    _check_resolution(nx, ny)
    bounds = bounds or field.bounds
    xs, ys = cell_centers(bounds, nx, ny)
    values, excluded = field.evaluate(np.column_stack([xs.ravel(), ys.ravel()]), band=exclusion_band)
    logger.debug(f"sampled {field.name} on {nx}x{ny}, {int(excluded.sum())} cells masked")
    return RasterGrid(
        bounds=tuple(bounds),
        nx=nx,
        ny=ny,
        samples=values.reshape(ny, nx, 2),
        mask=excluded.reshape(ny, nx),
    )


def l1_distance(
    field_a: PiecewiseField,
    field_b: PiecewiseField,
    bounds: Optional[Bounds] = None,
    nx: int = 256,
    ny: int = 256,
    exclusion_band: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Midpoint sum of |a - b| over cells inside both domains. Returns
    (value, upper_error): each cell masked by the exclusion band is bounded
    by 2 * cell area and counted in upper_error only.
    """
    _check_resolution(nx, ny)
    bounds = bounds or field_a.bounds
    xs, ys = cell_centers(bounds, nx, ny)
    points = np.column_stack([xs.ravel(), ys.ravel()])
    outside = ~(field_a.domain.contains_many(points) & field_b.domain.contains_many(points))
    a, excluded_a = field_a.evaluate(points, band=exclusion_band)
    b, excluded_b = field_b.evaluate(points, band=exclusion_band)
    masked = (excluded_a | excluded_b) & ~outside
    used = ~(excluded_a | excluded_b)

    xmin, xmax, ymin, ymax = bounds
    area = (xmax - xmin) * (ymax - ymin) / (nx * ny)
    value = float(np.sum(np.linalg.norm(a[used] - b[used], axis=1)) * area)
    upper_error = 2.0 * area * int(masked.sum())
    return value, upper_error


def _edges(rectangles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Counterclockwise edges (start, end, outward normal) of (xmin, ymin, xmax, ymax) rectangles."""
    x0, y0, x1, y1 = rectangles.T
    corners = [
        np.column_stack([x0, y0]),
        np.column_stack([x1, y0]),
        np.column_stack([x1, y1]),
        np.column_stack([x0, y1]),
    ]
    starts = np.stack(corners, axis=1).reshape(-1, 2)
    ends = np.stack(corners[1:] + corners[:1], axis=1).reshape(-1, 2)
    outward = np.array([[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    normals = np.tile(outward, (len(rectangles), 1))
    return starts, ends, normals


def _locate_breakpoints(
    field: PiecewiseField, starts: np.ndarray, ends: np.ndarray, t: np.ndarray, labels: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Bisect every sample interval whose end labels differ. A midpoint carrying a
    third label splits the interval, so thin regions between two samples are
    still resolved.
    """
    edge, k = np.nonzero(labels[:, 1:] != labels[:, :-1])
    lo, hi = t[k], t[k + 1]
    label_lo, label_hi = labels[edge, k], labels[edge, k + 1]
    steps = np.zeros(len(edge), dtype=int)
    found_edge: List[np.ndarray] = []
    found_t: List[np.ndarray] = []

    while edge.size:
        mid = 0.5 * (lo + hi)
        label = field.region_labels(starts[edge] + mid[:, None] * (ends[edge] - starts[edge]))
        at_lo = label == label_lo
        third = ~at_lo & (label != label_hi)

        split = (edge[third], mid[third], hi[third], label[third], label_hi[third], steps[third] + 1)
        lo = np.where(at_lo, mid, lo)
        hi = np.where(at_lo, hi, mid)
        label_hi = np.where(third, label, label_hi)
        steps = steps + 1

        edge = np.concatenate([edge, split[0]])
        lo = np.concatenate([lo, split[1]])
        hi = np.concatenate([hi, split[2]])
        label_lo = np.concatenate([label_lo, split[3]])
        label_hi = np.concatenate([label_hi, split[4]])
        steps = np.concatenate([steps, split[5]])

        done = (hi - lo <= BREAKPOINT_TOL) | (steps >= MAX_BREAKPOINT_STEPS)
        found_edge.append(edge[done])
        found_t.append(0.5 * (lo[done] + hi[done]))
        keep = ~done
        edge, lo, hi, label_lo, label_hi, steps = (
            edge[keep], lo[keep], hi[keep], label_lo[keep], label_hi[keep], steps[keep]
        )

    if not found_edge:
        return np.zeros(0, dtype=int), np.zeros(0)
    return np.concatenate(found_edge), np.concatenate(found_t)


def rectangle_fluxes(
    field: PiecewiseField, rectangles, quad_points_per_edge: int = GAUSS_LEGENDRE_ORDER
) -> np.ndarray:
    """
    Outward flux of the field through each rectangle (xmin, ymin, xmax, ymax).

    Each edge is split where the region label changes, and every piece is
    integrated with the formula of its own region by composite Gauss-Legendre
    with `quad_points_per_edge` nodes per panel.
    """
    rects = np.asarray(rectangles, dtype=float).reshape(-1, 4)
    if len(rects) == 0:
        return np.zeros(0)
    starts, ends, normals = _edges(rects)
    owner = np.repeat(np.arange(len(rects)), 4)
    delta = ends - starts
    edge_length = np.linalg.norm(delta, axis=1)

    t = np.linspace(0.0, 1.0, FLUX_SAMPLES_PER_EDGE + 1)
    samples = (starts[:, None, :] + t[None, :, None] * delta[:, None, :]).reshape(-1, 2)
    for curve in field.jump_curves:
        close = (curve.distance(samples) <= CURVE_BAND).reshape(len(starts), -1).sum(axis=1)
        if np.any(close > 1):
            raise RepositionError(rects[owner[int(np.argmax(close > 1))]], curve.name)
    labels = field.region_labels(samples).reshape(len(starts), -1)
    if np.any(labels < 0):
        raise DomainError(f"rectangle {tuple(rects[owner[int(np.argmax((labels < 0).any(axis=1)))]])} leaves the domain")

    bp_edge, bp_t = _locate_breakpoints(field, starts, ends, t, labels)
    all_edges = np.arange(len(starts))
    knot_edge = np.concatenate([all_edges, all_edges, bp_edge])
    knot_t = np.concatenate([np.zeros(len(starts)), np.ones(len(starts)), bp_t])
    order = np.lexsort((knot_t, knot_edge))
    knot_edge, knot_t = knot_edge[order], knot_t[order]

    same_edge = knot_edge[1:] == knot_edge[:-1]
    piece_edge = knot_edge[:-1][same_edge]
    a, b = knot_t[:-1][same_edge], knot_t[1:][same_edge]
    nonempty = b > a
    piece_edge, a, b = piece_edge[nonempty], a[nonempty], b[nonempty]
    piece_label = field.region_labels(starts[piece_edge] + (0.5 * (a + b))[:, None] * delta[piece_edge])

    panels = np.maximum(1, np.ceil((b - a) * edge_length[piece_edge] / FLUX_MAX_PANEL)).astype(int)
    panel_piece = np.repeat(np.arange(len(a)), panels)
    panel_index = np.arange(panel_piece.size) - np.repeat(np.cumsum(panels) - panels, panels)
    width = (b - a)[panel_piece] / panels[panel_piece]
    pa = a[panel_piece] + panel_index * width

    nodes, weights = np.polynomial.legendre.leggauss(quad_points_per_edge)
    tn = (pa + 0.5 * width)[:, None] + 0.5 * width[:, None] * nodes[None, :]
    panel_edge = piece_edge[panel_piece]
    points = starts[panel_edge][:, None, :] + tn[:, :, None] * delta[panel_edge][:, None, :]
    values = field.values_for_labels(
        points.reshape(-1, 2), np.repeat(piece_label[panel_piece], quad_points_per_edge)
    ).reshape(len(panel_piece), quad_points_per_edge, 2)

    normal_component = np.einsum("pqi,pi->pq", values, normals[panel_edge])
    contribution = (normal_component @ weights) * 0.5 * width * edge_length[panel_edge]
    logger.debug(f"flux over {len(rects)} rectangles: {len(bp_t)} breakpoints, {len(pa)} panels")
    return np.bincount(owner[panel_edge], weights=contribution, minlength=len(rects))


def flux_check(field: PiecewiseField, rectangles, quad_points_per_edge: int = GAUSS_LEGENDRE_ORDER) -> float:
    """Max |flux| through the rectangles; zero up to quadrature error for a divergence-free field."""
    fluxes = rectangle_fluxes(field, rectangles, quad_points_per_edge)
    return float(np.max(np.abs(fluxes))) if fluxes.size else 0.0


def _distance_to_rectangle_boundary(point: np.ndarray, rects: np.ndarray) -> np.ndarray:
    x0, y0, x1, y1 = rects.T
    px, py = point
    inside = (px >= x0) & (px <= x1) & (py >= y0) & (py <= y1)
    to_inner = np.minimum.reduce([px - x0, x1 - px, py - y0, y1 - py])
    dx = np.maximum.reduce([x0 - px, np.zeros_like(x0), px - x1])
    dy = np.maximum.reduce([y0 - py, np.zeros_like(y0), py - y1])
    return np.where(inside, to_inner, np.hypot(dx, dy))


def random_rectangles(
    field: PiecewiseField,
    count: int,
    seed: int = 0,
    clearance: float = RECTANGLE_CLEARANCE,
) -> np.ndarray:
    """
    `count` seeded rectangles (xmin, ymin, xmax, ymax) with all corners in the
    (convex) domain and edges at least `clearance` away from singular points.
    """
    rng = np.random.default_rng(seed)
    xmin, xmax, ymin, ymax = field.bounds
    accepted: List[np.ndarray] = []
    total = 0
    while total < count:
        batch = max(64, 4 * (count - total))
        xs = np.sort(rng.uniform(xmin, xmax, (batch, 2)), axis=1)
        ys = np.sort(rng.uniform(ymin, ymax, (batch, 2)), axis=1)
        rects = np.column_stack([xs[:, 0], ys[:, 0], xs[:, 1], ys[:, 1]])
        ok = (xs[:, 1] - xs[:, 0] >= MIN_RECTANGLE_SIZE) & (ys[:, 1] - ys[:, 0] >= MIN_RECTANGLE_SIZE)
        starts, _, _ = _edges(rects)
        ok &= field.domain.contains_many(starts, tol=0.0).reshape(-1, 4).all(axis=1)
        for point in field.singular_points:
            ok &= _distance_to_rectangle_boundary(point, rects) >= clearance
        accepted.append(rects[ok])
        total += int(ok.sum())
    return np.concatenate(accepted)[:count]


def trace_compatibility(field: PiecewiseField, samples: int = 1000) -> float:
    """max |trace_plus . nu - trace_minus . nu| over `samples` parameters of every curve."""
    worst = 0.0
    for curve in field.jump_curves:
        s = curve.parameters(samples)
        nu = curve.normal(s)
        gap = np.einsum("ij,ij->i", curve.trace_plus(s) - curve.trace_minus(s), nu)
        worst = max(worst, float(np.max(np.abs(gap))))
    return worst


def boundary_tangency(field: PiecewiseField, samples: int = 1000) -> float:
    """max |m . n| over boundary samples of Omega(theta0)."""
    if not field.tangent_boundary or not isinstance(field.domain, DomainSpec):
        raise DomainError(f"{field.name} declares no tangency on its boundary")
    points, normals = field.domain.boundary_samples(samples)
    values, _ = field.evaluate(points, band=None)
    return float(np.max(np.abs(np.einsum("ij,ij->i", values, normals))))


def _side_offsets(field: PiecewiseField, curve_index: int, points: np.ndarray, side_offset: float) -> np.ndarray:
    """side_offset, shrunk to 0.45 x the clearance from other curves, singular points and the boundary."""
    clearance = np.minimum(field.domain.boundary_distance_many(points), field.singular_distances(points))
    for j, other in enumerate(field.jump_curves):
        if j != curve_index:
            clearance = np.minimum(clearance, other.distance(points))
    return np.minimum(side_offset, 0.45 * clearance)


def _side_values(
    field: PiecewiseField, points: np.ndarray, normals: np.ndarray, offsets: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(plus values, minus values, reliable) at points +/- offset * normal."""
    band = 0.1 * offsets
    plus, excluded_plus = field.evaluate(points + offsets[:, None] * normals, band=band)
    minus, excluded_minus = field.evaluate(points - offsets[:, None] * normals, band=band)
    reliable = (offsets >= MIN_SIDE_OFFSET) & ~excluded_plus & ~excluded_minus
    return plus, minus, reliable


def trace_mismatch(field: PiecewiseField, samples: int = 1000, side_offset: float = DEFAULT_SIDE_OFFSET) -> float:
    """
    max |m(x +/- eps nu) - trace_+/-(x)| over interior curve samples: the
    declared traces agree with the neighbouring region formulas.
    """
    worst = 0.0
    for index, curve in enumerate(field.jump_curves):
        s = np.linspace(*curve.interval, samples + 2)[1:-1]
        points = curve.point(s)
        offsets = _side_offsets(field, index, points, side_offset)
        plus, minus, reliable = _side_values(field, points, curve.normal(s), offsets)
        if not np.any(reliable):
            continue
        deviation = np.maximum(
            np.linalg.norm(plus - curve.trace_plus(s), axis=1),
            np.linalg.norm(minus - curve.trace_minus(s), axis=1),
        )
        worst = max(worst, float(np.max(deviation[reliable])))
    return worst


def numeric_line_energy(
    field: PiecewiseField,
    f: JumpCost,
    n_segments: int = 10_000,
    side_offset: float = DEFAULT_SIDE_OFFSET,
) -> EnergyBreakdown:
    """
    Polygonal estimate of the line energy: each curve is cut into `n_segments`
    chords; on each chord the traces are measured by evaluating the field at the
    on-curve parameter midpoint +/- offset along the chord normal, and the
    energy is sum f(|m+ - m-|) |chord|. Chords whose offset collapses below
    MIN_SIDE_OFFSET, or whose offset points are excluded, are skipped and counted.
    """
    if n_segments < 8:
        raise DomainError(f"numeric_line_energy needs n_segments >= 8, got {n_segments}")
    if not side_offset > 0:
        raise DomainError(f"side_offset must be positive, got {side_offset!r}")

    per_curve = []
    unreliable = 0
    for index, curve in enumerate(field.jump_curves):
        s = curve.parameters(n_segments + 1)
        chords = np.diff(curve.point(s), axis=0)
        lengths = np.linalg.norm(chords, axis=1)
        normals = np.column_stack([-chords[:, 1], chords[:, 0]]) / lengths[:, None]
        midpoints = curve.point(0.5 * (s[:-1] + s[1:]))

        offsets = _side_offsets(field, index, midpoints, side_offset)
        plus, minus, reliable = _side_values(field, midpoints, normals, offsets)
        jumps = np.clip(np.linalg.norm(plus[reliable] - minus[reliable], axis=1), 0.0, 2.0)
        energy = float(np.sum(f.evaluate(jumps) * lengths[reliable]))

        skipped = int((~reliable).sum())
        if skipped:
            logger.warning(f"numeric_line_energy: {skipped} unreliable segments on '{curve.name}'")
        unreliable += skipped
        per_curve.append((curve.name, energy))

    total = float(sum(value for _, value in per_curve))
    return EnergyBreakdown(per_curve=per_curve, total=total, unreliable_segments=unreliable)


@dataclass(frozen=True)
class Certificate:
    field: str
    certificate: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.value <= self.threshold

    @property
    def status(self) -> CertificateStatus:
        return CertificateStatus.PASSED if self.passed else CertificateStatus.FAILED

    def csv_row(self) -> list:
        return [self.field, self.certificate, self.value, self.threshold, str(self.passed).lower()]


UNIT_NORM_THRESHOLD = 1e-12
FLUX_THRESHOLD = 1e-7
TRACE_THRESHOLD = 1e-12
TRACE_MISMATCH_THRESHOLD = 1e-5
TANGENCY_THRESHOLD = 1e-12


def certify_field(
    field: PiecewiseField,
    grid: int = 256,
    rectangle_count: int = 1000,
    seed: int = 0,
) -> Tuple[List[Certificate], RasterGrid]:
    """Run the divergence-free and unit-norm certificates on one field."""
    raster = sample_field(field, nx=grid, ny=grid)
    rectangles = random_rectangles(field, rectangle_count, seed=seed)
    certificates = [
        Certificate(field.name, "unit_norm", raster.unit_norm_deviation(), UNIT_NORM_THRESHOLD),
        Certificate(field.name, "flux", flux_check(field, rectangles), FLUX_THRESHOLD),
        Certificate(field.name, "trace_compatibility", trace_compatibility(field), TRACE_THRESHOLD),
        Certificate(field.name, "trace_mismatch", trace_mismatch(field), TRACE_MISMATCH_THRESHOLD),
    ]
    if field.tangent_boundary:
        certificates.append(
            Certificate(field.name, "boundary_tangency", boundary_tangency(field), TANGENCY_THRESHOLD)
        )
    for certificate in certificates:
        logger.debug(f"{certificate.field} {certificate.certificate}: {certificate.value:.3e} ({certificate.status.value})")
    return certificates, raster
