"""
Divergence-free unit vector fields given by closed-form region formulas and an
explicit list of jump curves.

Orientation: ⊥ is the counterclockwise rotation by pi/2, so the tangent field
-i e^{i psi} is (y/r, -x/r). Every jump curve labels its sides by its normal
nu: trace_plus is the limit on the side nu points to.

Fields:
  viscosity   m0 = (grad phi_0)⊥ on Omega(theta0), one jump curve [O, B].
  competitor  m = (grad phi)⊥ on Omega(theta0), jump curves C_theta0, gamma, [I, B].
  one_d       (-/+ sin theta0, cos theta0) for +/- x2 > 0 on (0,1)x(-1,1).
  tile        the competitor on the kite rescaled by cos theta0, negated, and
              extended by the one_d values.
  tiling      n horizontally repeated 1/n-scaled tiles.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from constants import BOUNDARY_TOL, CURVE_BAND, FieldKind
from errors import AmbiguityError, DomainError
from geometry import (
    DomainSpec,
    Point,
    PolarCurve,
    as_points,
    build_domain,
    check_angle,
    gamma_line_element_array,
    gamma_points_array,
    gamma_radius_array,
    segment_distance,
)
from util import format_key_value_text, parse_key_value_text

logger = logging.getLogger(__name__)

Vectors = np.ndarray


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    return vectors / np.linalg.norm(vectors, axis=1)[:, None]


def _constant_rows(vector, count: int) -> np.ndarray:
    return np.tile(np.asarray(vector, dtype=float), (count, 1))


def tangent_field(points: np.ndarray) -> Vectors:
    """-i e^{i psi} = (y/r, -x/r); the value at O is taken along psi = 0."""
    r = np.hypot(points[:, 0], points[:, 1])
    values = _constant_rows((0.0, -1.0), len(points))
    away = r > 0
    values[away] = np.column_stack([points[away, 1] / r[away], -points[away, 0] / r[away]])
    return values


def counter_tangent_field(points: np.ndarray) -> Vectors:
    """+i e^{i psi} = (-y/r, x/r)."""
    return -tangent_field(points)


def shell_value(theta0: float, upper: bool) -> Tuple[float, float]:
    """-i e^{+/- i theta0}: the rotated gradient of the distance to [A, B] / [A', B]."""
    if upper:
        return (math.sin(theta0), -math.cos(theta0))
    return (-math.sin(theta0), -math.cos(theta0))


def one_d_values(theta0: float) -> Tuple[Point, Point]:
    """(m_plus, m_minus) = ((-sin theta0, cos theta0), (sin theta0, cos theta0))."""
    return (-math.sin(theta0), math.cos(theta0)), (math.sin(theta0), math.cos(theta0))


class JumpCurve(ABC):
    """
    A parametrized jump curve. All methods are vectorized over an array of
    parameters s in `interval`.
    """

    name: str
    interval: Tuple[float, float]
    # parameters where the curve or its traces are not smooth
    breakpoints: Tuple[float, ...] = ()
    # set when the jump size is constant along a straight curve or arc
    constant_jump: Optional[float] = None

    @abstractmethod
    def point(self, s) -> np.ndarray: ...

    @abstractmethod
    def line_element(self, s) -> np.ndarray: ...

    @abstractmethod
    def normal(self, s) -> np.ndarray: ...

    @abstractmethod
    def trace_plus(self, s) -> np.ndarray: ...

    @abstractmethod
    def trace_minus(self, s) -> np.ndarray: ...

    @abstractmethod
    def distance(self, points: np.ndarray) -> np.ndarray:
        """Distance (or a first-order estimate of it near the curve) from each point."""

    @property
    @abstractmethod
    def length(self) -> float: ...

    def jump_size(self, s) -> np.ndarray:
        return np.linalg.norm(self.trace_plus(s) - self.trace_minus(s), axis=1)

    def parameters(self, count: int) -> np.ndarray:
        return np.linspace(self.interval[0], self.interval[1], count)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class SegmentCurve(JumpCurve):
    """Straight segment p0 -> p1, s in [0, 1], with constant traces."""

    def __init__(self, name: str, p0, p1, normal, plus, minus):
        self.name = name
        self.interval = (0.0, 1.0)
        self.p0 = np.asarray(p0, dtype=float)
        self.p1 = np.asarray(p1, dtype=float)
        self._normal = np.asarray(normal, dtype=float)
        self._plus = np.asarray(plus, dtype=float)
        self._minus = np.asarray(minus, dtype=float)
        self.constant_jump = float(np.linalg.norm(self._plus - self._minus))

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p1 - self.p0))

    def point(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return self.p0 + s[:, None] * (self.p1 - self.p0)

    def line_element(self, s) -> np.ndarray:
        return np.full(np.shape(np.atleast_1d(s)), self.length)

    def normal(self, s) -> np.ndarray:
        return _constant_rows(self._normal, np.size(s))

    def trace_plus(self, s) -> np.ndarray:
        return _constant_rows(self._plus, np.size(s))

    def trace_minus(self, s) -> np.ndarray:
        return _constant_rows(self._minus, np.size(s))

    def jump_size(self, s) -> np.ndarray:
        return np.full(np.shape(np.atleast_1d(s)), self.constant_jump)

    def distance(self, points: np.ndarray) -> np.ndarray:
        return segment_distance(points, self.p0, self.p1)


class ArcCurve(JumpCurve):
    """
    C_theta0 = {e^{i theta}: |theta| <= theta0}, nu = e^{i theta}; the disk side
    carries -i e^{i theta} and the outer side +i e^{i theta}, a constant jump of 2.
    """

    constant_jump = 2.0

    def __init__(self, theta0: float, name: str = "arc C_theta0"):
        self.name = name
        self.theta0 = theta0
        self.polar = PolarCurve(theta0)
        self.interval = self.polar.parameter_range

    @property
    def length(self) -> float:
        return 2.0 * self.theta0

    def point(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.column_stack([np.cos(s), np.sin(s)])

    def line_element(self, s) -> np.ndarray:
        return np.ones(np.shape(np.atleast_1d(s)))

    def normal(self, s) -> np.ndarray:
        return self.point(s)

    def trace_plus(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.column_stack([-np.sin(s), np.cos(s)])

    def trace_minus(self, s) -> np.ndarray:
        return -self.trace_plus(s)

    def jump_size(self, s) -> np.ndarray:
        return np.full(np.shape(np.atleast_1d(s)), 2.0)

    def distance(self, points: np.ndarray) -> np.ndarray:
        r = np.hypot(points[:, 0], points[:, 1])
        psi = np.arctan2(points[:, 1], points[:, 0])
        ends = self.point([self.theta0, -self.theta0])
        to_ends = np.minimum(
            np.linalg.norm(points - ends[0], axis=1), np.linalg.norm(points - ends[1], axis=1)
        )
        return np.where(np.abs(psi) <= self.theta0, np.abs(r - 1.0), to_ends)


class GammaCurve(JumpCurve):
    """
    gamma_theta0 over theta in [-theta0, theta0], from A' through I to A.

    nu is the bisector of e^{i theta} and e^{i sgn(theta) theta0} (sgn(0) = +1);
    the outer side carries the shell value -i e^{i sgn(theta) theta0} and the
    annulus side +i e^{i theta}. The jump size is |e^{i alpha} + 1| = 2 cos(alpha/2).
    """

    def __init__(self, theta0: float, name: str = "gamma"):
        self.name = name
        self.theta0 = theta0
        self.polar = PolarCurve(theta0)
        self.interval = self.polar.parameter_range
        self.breakpoints = (0.0,)

    def _branch(self, s) -> np.ndarray:
        return np.where(np.asarray(s) < 0, -self.theta0, self.theta0)

    @property
    def length(self) -> float:
        # 4 * integral_0^{theta0/2} sec^3 u du
        u = self.theta0 / 2.0
        sec, tan = 1.0 / math.cos(u), math.tan(u)
        return 2.0 * (sec * tan + math.log(sec + tan))

    def point(self, s) -> np.ndarray:
        return gamma_points_array(self.theta0, np.atleast_1d(np.asarray(s, dtype=float)))

    def line_element(self, s) -> np.ndarray:
        return gamma_line_element_array(self.theta0, np.atleast_1d(np.asarray(s, dtype=float)))

    def normal(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        branch = self._branch(s)
        bisector = np.column_stack([np.cos(s) + np.cos(branch), np.sin(s) + np.sin(branch)])
        return _unit_rows(bisector)

    def trace_plus(self, s) -> np.ndarray:
        branch = self._branch(np.atleast_1d(np.asarray(s, dtype=float)))
        return np.column_stack([np.sin(branch), -np.cos(branch)])

    def trace_minus(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.column_stack([-np.sin(s), np.cos(s)])

    def jump_size(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return 2.0 * np.cos((self.theta0 - np.abs(s)) / 2.0)

    def distance(self, points: np.ndarray) -> np.ndarray:
        # each branch is a parabola with focus O and directrix the tangent line;
        # g = r + x.e^{+/- i theta0} - 2 vanishes on it and |grad g| = 2 cos(alpha/2)
        r = np.hypot(points[:, 0], points[:, 1])
        psi = np.arctan2(points[:, 1], points[:, 0])
        branch = np.where(psi < 0, -self.theta0, self.theta0)
        g = r + points[:, 0] * np.cos(branch) + points[:, 1] * np.sin(branch) - 2.0
        alpha = self.theta0 - np.abs(psi)
        level_set = np.abs(g) / (2.0 * np.cos(np.clip(alpha, 0.0, None) / 2.0))
        ends = self.point([self.theta0, -self.theta0])
        to_ends = np.minimum(
            np.linalg.norm(points - ends[0], axis=1), np.linalg.norm(points - ends[1], axis=1)
        )
        return np.where(np.abs(psi) <= self.theta0, level_set, to_ends)


class TransformedCurve(JumpCurve):
    """
    The image of `base` under x -> offset + scale * x (scale > 0), with both
    traces negated when `negate` is set. Normals and jump sizes are unchanged.
    """

    def __init__(self, base: JumpCurve, scale: float, offset=(0.0, 0.0), negate: bool = False, name: Optional[str] = None):
        if not scale > 0:
            raise DomainError(f"curve scale must be positive, got {scale!r}")
        self.base = base
        self.scale = float(scale)
        self.offset = np.asarray(offset, dtype=float)
        self.negate = negate
        self.name = name or base.name
        self.interval = base.interval
        self.breakpoints = base.breakpoints
        self.constant_jump = base.constant_jump

    @property
    def length(self) -> float:
        return self.scale * self.base.length

    def point(self, s) -> np.ndarray:
        return self.offset + self.scale * self.base.point(s)

    def line_element(self, s) -> np.ndarray:
        return self.scale * self.base.line_element(s)

    def normal(self, s) -> np.ndarray:
        return self.base.normal(s)

    def trace_plus(self, s) -> np.ndarray:
        plus = self.base.trace_plus(s)
        return -plus if self.negate else plus

    def trace_minus(self, s) -> np.ndarray:
        minus = self.base.trace_minus(s)
        return -minus if self.negate else minus

    def jump_size(self, s) -> np.ndarray:
        return self.base.jump_size(s)

    def distance(self, points: np.ndarray) -> np.ndarray:
        return self.scale * self.base.distance((points - self.offset) / self.scale)


@dataclass(frozen=True)
class RectangleDomain:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    def contains_many(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        pts = as_points(points)
        return (
            (pts[:, 0] >= self.xmin - tol)
            & (pts[:, 0] <= self.xmax + tol)
            & (pts[:, 1] >= self.ymin - tol)
            & (pts[:, 1] <= self.ymax + tol)
        )

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        return bool(self.contains_many(x, tol)[0])

    def boundary_distance_many(self, points) -> np.ndarray:
        pts = as_points(points)
        return np.minimum.reduce(
            [pts[:, 0] - self.xmin, self.xmax - pts[:, 0], pts[:, 1] - self.ymin, self.ymax - pts[:, 1]]
        )


UNIT_STRIP = RectangleDomain(0.0, 1.0, -1.0, 1.0)

FieldDomain = Union[DomainSpec, RectangleDomain]


@dataclass(frozen=True)
class Region:
    """A membership predicate and a unit-vector formula, both vectorized over local points."""

    name: str
    contains: Callable[[np.ndarray], np.ndarray]
    value: Callable[[np.ndarray], np.ndarray]


def _everywhere(points: np.ndarray) -> np.ndarray:
    return np.ones(len(points), dtype=bool)


def _upper_half(points: np.ndarray) -> np.ndarray:
    return points[:, 1] >= 0


def _constant(vector) -> Callable[[np.ndarray], np.ndarray]:
    return lambda points: _constant_rows(vector, len(points))


class PiecewiseField:
    """
    A field given by ordered regions: a point belongs to the first region whose
    predicate holds. Regions are stated in local coordinates; `tiles > 1`
    repeats them horizontally with period 1/tiles and scale 1/tiles, and the
    region label then folds in the tile index as tile * len(regions) + k.
    """

    def __init__(
        self,
        kind: FieldKind,
        theta0: float,
        domain: FieldDomain,
        regions: Sequence[Region],
        jump_curves: Sequence[JumpCurve],
        singular_points: Sequence[Point] = (),
        tangent_boundary: bool = False,
        tiles: int = 1,
    ):
        self.kind = kind
        self.theta0 = theta0
        self.domain = domain
        self.regions = list(regions)
        self.jump_curves = list(jump_curves)
        self.singular_points = np.asarray(singular_points, dtype=float).reshape(-1, 2)
        self.tangent_boundary = tangent_boundary
        self.tiles = tiles

    @property
    def name(self) -> str:
        if self.kind is FieldKind.TILING:
            return f"{self.kind.value}(theta0={self.theta0:g}, n={self.tiles})"
        return f"{self.kind.value}(theta0={self.theta0:g})"

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return self.domain.bounds

    def descriptor(self) -> "FieldDescriptor":
        return FieldDescriptor(kind=self.kind, theta0=self.theta0, n=self.tiles if self.kind is FieldKind.TILING else None)

    def to_local(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.tiles == 1:
            return points, np.zeros(len(points), dtype=int)
        n = self.tiles
        tile = np.clip(np.floor(points[:, 0] * n), 0, n - 1).astype(int)
        local = np.column_stack([points[:, 0] * n - tile, points[:, 1] * n])
        return local, tile

    def region_labels(self, points) -> np.ndarray:
        """Region index per point; -1 outside the closed domain."""
        pts = as_points(points)
        local, tile = self.to_local(pts)
        labels = np.full(len(pts), -1, dtype=int)
        unassigned = self.domain.contains_many(pts)
        for k, region in enumerate(self.regions):
            hit = unassigned & region.contains(local)
            labels[hit] = k
            unassigned &= ~hit
        inside = labels >= 0
        labels[inside] += tile[inside] * len(self.regions)
        return labels

    def values_for_labels(self, points, labels: np.ndarray) -> Vectors:
        """Evaluate the formula of the given region at each point; NaN for label -1."""
        pts = as_points(points)
        local, _ = self.to_local(pts)
        values = np.full((len(pts), 2), np.nan)
        region_index = np.where(labels >= 0, labels % len(self.regions), -1)
        for k, region in enumerate(self.regions):
            mask = region_index == k
            if np.any(mask):
                values[mask] = region.value(local[mask])
        return values

    def curve_distances(self, points) -> np.ndarray:
        """(N, K) distances from each point to each jump curve."""
        pts = as_points(points)
        if not self.jump_curves:
            return np.full((len(pts), 0), np.inf)
        return np.column_stack([curve.distance(pts) for curve in self.jump_curves])

    def singular_distances(self, points) -> np.ndarray:
        pts = as_points(points)
        if len(self.singular_points) == 0:
            return np.full(len(pts), np.inf)
        diff = pts[:, None, :] - self.singular_points[None, :, :]
        return np.min(np.linalg.norm(diff, axis=2), axis=1)

    def excluded(self, points, band) -> np.ndarray:
        """Points outside the domain or within `band` of a jump curve or singular point."""
        pts = as_points(points)
        out = ~self.domain.contains_many(pts)
        if band is None:
            return out
        band = np.broadcast_to(np.asarray(band, dtype=float), (len(pts),))
        near = self.singular_distances(pts) <= band
        if self.jump_curves:
            near |= np.min(self.curve_distances(pts), axis=1) <= band
        return out | near

    def evaluate(self, points, band: Optional[Union[float, np.ndarray]] = CURVE_BAND) -> Tuple[Vectors, np.ndarray]:
        """
        Vectorized evaluation: returns (values, excluded) with NaN values at
        excluded points. `band=None` only excludes points outside the domain.
        """
        pts = as_points(points)
        excluded = self.excluded(pts, band)
        labels = self.region_labels(pts)
        labels[excluded] = -1
        return self.values_for_labels(pts, labels), excluded

    def eval(self, x) -> np.ndarray:
        pts = as_points(x)
        if not self.domain.contains(pts[0]):
            raise DomainError(f"point {tuple(pts[0])} lies outside the domain of {self.name}")
        if self.singular_distances(pts)[0] <= CURVE_BAND:
            raise AmbiguityError("singular point", pts[0])
        if self.jump_curves:
            distances = self.curve_distances(pts)[0]
            nearest = int(np.argmin(distances))
            if distances[nearest] <= CURVE_BAND:
                raise AmbiguityError(self.jump_curves[nearest].name, pts[0])
        values, _ = self.evaluate(pts, band=None)
        return values[0]

    def __repr__(self) -> str:
        return f"PiecewiseField({self.name}, {len(self.jump_curves)} jump curves)"


def eval_field(field: PiecewiseField, x) -> np.ndarray:
    return field.eval(x)


def jump_curves(field: PiecewiseField) -> List[JumpCurve]:
    return list(field.jump_curves)


def viscosity_field(theta0: float) -> PiecewiseField:
    domain = build_domain(theta0)
    theta0 = domain.theta0
    upper, lower = shell_value(theta0, True), shell_value(theta0, False)
    regions = [
        Region("disk sector", lambda p: np.abs(np.arctan2(p[:, 1], p[:, 0])) > theta0, tangent_field),
        Region("upper wedge", _upper_half, _constant(upper)),
        Region("lower wedge", _everywhere, _constant(lower)),
    ]
    ridge = SegmentCurve("[O,B]", domain.O, domain.B, (0.0, 1.0), upper, lower)
    return PiecewiseField(
        FieldKind.VISCOSITY,
        theta0,
        domain,
        regions,
        [ridge],
        singular_points=[domain.O],
        tangent_boundary=True,
    )


def _competitor_parts(theta0: float, domain: DomainSpec) -> Tuple[List[Region], List[JumpCurve]]:
    upper, lower = shell_value(theta0, True), shell_value(theta0, False)

    def in_disk(p):
        # |psi| > theta0 inside the closed domain only happens on the disk side
        return (np.hypot(p[:, 0], p[:, 1]) < 1.0) | (np.abs(np.arctan2(p[:, 1], p[:, 0])) > theta0)

    def in_annulus(p):
        psi = np.clip(np.arctan2(p[:, 1], p[:, 0]), -theta0, theta0)
        return np.hypot(p[:, 0], p[:, 1]) < gamma_radius_array(theta0, psi)

    regions = [
        Region("disk", in_disk, tangent_field),
        Region("annulus", in_annulus, counter_tangent_field),
        Region("upper shell", _upper_half, _constant(upper)),
        Region("lower shell", _everywhere, _constant(lower)),
    ]
    curves = [
        ArcCurve(theta0),
        GammaCurve(theta0),
        SegmentCurve("[I,B]", domain.I_point, domain.B, (0.0, 1.0), upper, lower),
    ]
    return regions, curves


def competitor_field(theta0: float) -> PiecewiseField:
    domain = build_domain(theta0)
    regions, curves = _competitor_parts(domain.theta0, domain)
    return PiecewiseField(
        FieldKind.COMPETITOR,
        domain.theta0,
        domain,
        regions,
        curves,
        singular_points=[domain.O],
        tangent_boundary=True,
    )


def one_d_transition(theta0: float) -> PiecewiseField:
    theta0 = check_angle(theta0)
    m_plus, m_minus = one_d_values(theta0)
    regions = [
        Region("upper", _upper_half, _constant(m_plus)),
        Region("lower", _everywhere, _constant(m_minus)),
    ]
    wall = SegmentCurve("{x2=0}", (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), m_plus, m_minus)
    return PiecewiseField(FieldKind.ONE_D, theta0, UNIT_STRIP, regions, [wall])


def _tile_parts(theta0: float) -> Tuple[List[Region], List[JumpCurve]]:
    c = math.cos(theta0)
    m_plus, m_minus = one_d_values(theta0)

    def in_wedge(p):
        return np.abs(np.arctan2(p[:, 1], p[:, 0])) < theta0

    def in_core(p):
        return in_wedge(p) & (np.hypot(p[:, 0], p[:, 1]) < c)

    def in_annulus(p):
        psi = np.clip(np.arctan2(p[:, 1], p[:, 0]), -theta0, theta0)
        return in_wedge(p) & (np.hypot(p[:, 0], p[:, 1]) < c * gamma_radius_array(theta0, psi))

    regions = [
        Region("core", in_core, counter_tangent_field),
        Region("annulus", in_annulus, tangent_field),
        Region("upper", _upper_half, _constant(m_plus)),
        Region("lower", _everywhere, _constant(m_minus)),
    ]
    _, competitor_curves = _competitor_parts(theta0, build_domain(theta0))
    curves = [TransformedCurve(curve, scale=c, negate=True) for curve in competitor_curves]
    return regions, curves


def tile_field(theta0: float) -> PiecewiseField:
    """
    m~(x) = -m(x / cos theta0) on the rescaled kite, m_plus / m_minus elsewhere
    on (0,1)x(-1,1). The kite spans O = (0,0) to B = (1,0) and has half-height
    sin theta0 cos theta0.
    """
    theta0 = check_angle(theta0)
    regions, curves = _tile_parts(theta0)
    return PiecewiseField(FieldKind.TILE, theta0, UNIT_STRIP, regions, curves, singular_points=[(0.0, 0.0)])


def tiling_field(theta0: float, n: int) -> PiecewiseField:
    """m_n(x1, x2) = m~(n x1 - i, n x2) on the i-th column [i/n, (i+1)/n]."""
    theta0 = check_angle(theta0)
    if n < 1:
        raise DomainError(f"tiling needs n >= 1, got {n}")
    regions, tile_curves = _tile_parts(theta0)
    curves = [
        TransformedCurve(curve, scale=1.0 / n, offset=(i / n, 0.0), name=f"tile {i}: {curve.name}")
        for i in range(n)
        for curve in tile_curves
    ]
    singular = [(i / n, 0.0) for i in range(n)]
    return PiecewiseField(FieldKind.TILING, theta0, UNIT_STRIP, regions, curves, singular_points=singular, tiles=n)


@dataclass(frozen=True)
class FieldDescriptor:
    """
    Key-value text form of a field:

    kind = tiling
    theta0 = 0.05
    n = 4
    """

    kind: FieldKind
    theta0: float
    n: Optional[int] = None

    def __post_init__(self):
        check_angle(self.theta0)
        if self.kind is FieldKind.TILING and (self.n is None or self.n < 1):
            raise DomainError(f"a tiling descriptor needs n >= 1, got {self.n!r}")

    def dumps(self) -> str:
        values = {"kind": self.kind.value, "theta0": repr(float(self.theta0))}
        if self.kind is FieldKind.TILING:
            values["n"] = self.n
        return format_key_value_text(values)

    @classmethod
    def loads(cls, text: str) -> "FieldDescriptor":
        values = parse_key_value_text(text)
        unknown = set(values) - {"kind", "theta0", "n"}
        if unknown:
            raise DomainError(f"unknown field descriptor keys: {sorted(unknown)}")
        try:
            kind = FieldKind(values["kind"])
            theta0 = float(values["theta0"])
            n = int(values["n"]) if "n" in values else None
        except KeyError as e:
            raise DomainError(f"field descriptor is missing '{e.args[0]}'") from e
        except ValueError as e:
            raise DomainError(f"malformed field descriptor: {e}") from e
        return cls(kind=kind, theta0=theta0, n=n)

    def build(self) -> PiecewiseField:
        if self.kind is FieldKind.VISCOSITY:
            return viscosity_field(self.theta0)
        if self.kind is FieldKind.COMPETITOR:
            return competitor_field(self.theta0)
        if self.kind is FieldKind.ONE_D:
            return one_d_transition(self.theta0)
        if self.kind is FieldKind.TILE:
            return tile_field(self.theta0)
        return tiling_field(self.theta0, self.n)
