"""
The convex domain Omega(theta0) and the equidistance curve gamma.

Omega(theta0) is the interior of the convex hull of the unit circle C and the
point B = (1/cos theta0, 0): its boundary is the large arc {e^{i psi}: |psi| >=
theta0} plus the two tangent segments [A, B] and [A', B] (together called
Gamma), with A = e^{i theta0} and A' = e^{-i theta0}.

gamma is the set of points with |psi| < theta0 equidistant from C and Gamma.
Its polar equation is r(theta) = 2 / (1 + cos(theta0 - |theta|)), which comes
from balancing r - 1 against the distance 1 - r cos(theta0 - theta) to the
tangent segment. It meets [O, B] at I with |OI| = r(0) = 1/cos^2(theta0/2).
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from constants import BOUNDARY_TOL
from errors import DomainError

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


def check_angle(theta0: float) -> float:
    theta0 = float(theta0)
    if not (0.0 < theta0 < math.pi / 2):
        raise DomainError(f"theta0 must lie in the open interval (0, pi/2), got {theta0!r}")
    return theta0


def as_points(points) -> np.ndarray:
    """Coerce a point or a sequence of points to an (N, 2) float array."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError(f"expected planar points of shape (N, 2), got {arr.shape}")
    return arr


def segment_distance(points: np.ndarray, p0, p1) -> np.ndarray:
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    s = np.clip(((points - p0) @ d) / (d @ d), 0.0, 1.0)
    return np.linalg.norm(points - (p0 + s[:, None] * d), axis=1)


def large_arc_distance(points: np.ndarray, theta0: float) -> np.ndarray:
    """Distance to the arc {e^{i psi}: |psi| >= theta0} by angular clamping."""
    r = np.hypot(points[:, 0], points[:, 1])
    psi = np.arctan2(points[:, 1], points[:, 0])
    a = np.array([math.cos(theta0), math.sin(theta0)])
    a_prime = np.array([a[0], -a[1]])
    to_ends = np.minimum(
        np.linalg.norm(points - a, axis=1), np.linalg.norm(points - a_prime, axis=1)
    )
    return np.where(np.abs(psi) >= theta0, np.abs(r - 1.0), to_ends)


@dataclass(frozen=True)
class DomainSpec:
    theta0: float
    A: Point
    A_prime: Point
    B: Point
    I_point: Point
    len_OB: float
    len_OI: float
    len_IB: float

    @property
    def O(self) -> Point:
        return (0.0, 0.0)

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        """Bounding box (xmin, xmax, ymin, ymax) of the closed domain."""
        return (-1.0, self.len_OB, -1.0, 1.0)

    @property
    def segment_length(self) -> float:
        """|AB| = |A'B| = tan(theta0)."""
        return math.tan(self.theta0)

    def contains_many(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        pts = as_points(points)
        r = np.hypot(pts[:, 0], pts[:, 1])
        psi = np.arctan2(pts[:, 1], pts[:, 0])
        c, s = math.cos(self.theta0), math.sin(self.theta0)
        below_tangents = (pts @ np.array([c, s]) <= 1.0 + tol) & (pts @ np.array([c, -s]) <= 1.0 + tol)
        in_wedge = np.abs(psi) <= self.theta0 + tol
        return (r <= 1.0 + tol) | (in_wedge & below_tangents)

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        return bool(self.contains_many(x, tol)[0])

    def boundary_distance_many(self, points) -> np.ndarray:
        """Distance to the boundary for points already known to be in the domain."""
        pts = as_points(points)
        return np.minimum.reduce(
            [
                large_arc_distance(pts, self.theta0),
                segment_distance(pts, self.A, self.B),
                segment_distance(pts, self.A_prime, self.B),
            ]
        )

    def boundary_samples(self, count: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Roughly `count` boundary points with their exterior unit normals, spread
        proportionally to arc length and kept off the corners A, A', B.
        """
        arc_length = 2.0 * (math.pi - self.theta0)
        total = arc_length + 2.0 * self.segment_length
        n_arc = max(1, int(round(count * arc_length / total)))
        n_seg = max(1, (count - n_arc) // 2)

        psi = np.linspace(self.theta0, 2.0 * math.pi - self.theta0, n_arc + 2)[1:-1]
        arc_pts = np.column_stack([np.cos(psi), np.sin(psi)])

        s = np.linspace(0.0, 1.0, n_seg + 2)[1:-1, None]
        a, a_prime, b = np.array(self.A), np.array(self.A_prime), np.array(self.B)
        upper = a + s * (b - a)
        lower = a_prime + s * (b - a_prime)
        c, sn = math.cos(self.theta0), math.sin(self.theta0)

        points = np.vstack([arc_pts, upper, lower])
        normals = np.vstack(
            [arc_pts, np.tile([c, sn], (n_seg, 1)), np.tile([c, -sn], (n_seg, 1))]
        )
        return points, normals


def build_domain(theta0: float) -> DomainSpec:
    theta0 = check_angle(theta0)
    c, s = math.cos(theta0), math.sin(theta0)
    len_ob = 1.0 / c
    len_oi = 1.0 / math.cos(theta0 / 2.0) ** 2
    return DomainSpec(
        theta0=theta0,
        A=(c, s),
        A_prime=(c, -s),
        B=(len_ob, 0.0),
        I_point=(len_oi, 0.0),
        len_OB=len_ob,
        len_OI=len_oi,
        len_IB=len_ob - len_oi,
    )


def kite_area(theta0: float) -> float:
    """Area of Omega_0 = Omega cap {|psi| < theta0}: two right triangles O-A-B."""
    return math.tan(check_angle(theta0))


def _check_parameter(theta0: float, theta: float) -> Tuple[float, float]:
    theta0 = check_angle(theta0)
    theta = float(theta)
    if abs(theta) > theta0:
        raise DomainError(f"gamma parameter must satisfy |theta| <= theta0={theta0!r}, got {theta!r}")
    return theta0, theta


# Vectorized kernels; callers are responsible for |theta| <= theta0.


def gamma_radius_array(theta0: float, theta) -> np.ndarray:
    return 2.0 / (1.0 + np.cos(theta0 - np.abs(theta)))


def gamma_radius_derivative_array(theta0: float, theta) -> np.ndarray:
    alpha = theta0 - np.abs(theta)
    sign = np.where(np.asarray(theta) < 0, -1.0, 1.0)
    return -sign * 2.0 * np.sin(alpha) / (1.0 + np.cos(alpha)) ** 2


def gamma_line_element_array(theta0: float, theta) -> np.ndarray:
    return np.cos((theta0 - np.abs(theta)) / 2.0) ** -3


def gamma_points_array(theta0: float, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    r = gamma_radius_array(theta0, theta)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def gamma_radius(theta0: float, theta: float) -> float:
    theta0, theta = _check_parameter(theta0, theta)
    return 2.0 / (1.0 + math.cos(theta0 - abs(theta)))


def gamma_radius_derivative(theta0: float, theta: float) -> float:
    """dr/dtheta; one-sided (theta >= 0 branch) at the corner theta = 0."""
    theta0, theta = _check_parameter(theta0, theta)
    return float(gamma_radius_derivative_array(theta0, theta))


def gamma_line_element(theta0: float, theta: float) -> float:
    """
    |d gamma / d theta| = cos^-3(alpha/2) with alpha = theta0 - |theta|, the
    closed form of sqrt(r^2 + r'^2) via 2(1 + cos alpha) = 4 cos^2(alpha/2).
    """
    theta0, theta = _check_parameter(theta0, theta)
    return math.cos((theta0 - abs(theta)) / 2.0) ** -3


@dataclass(frozen=True)
class PolarCurve:
    """gamma as a polar curve over theta in [-theta0, theta0]."""

    theta0: float

    def __post_init__(self):
        check_angle(self.theta0)

    @property
    def parameter_range(self) -> Tuple[float, float]:
        return (-self.theta0, self.theta0)

    def radius(self, theta: float) -> float:
        return gamma_radius(self.theta0, theta)

    def radius_derivative(self, theta: float) -> float:
        return gamma_radius_derivative(self.theta0, theta)

    def line_element(self, theta: float) -> float:
        return gamma_line_element(self.theta0, theta)

    def point(self, theta: float) -> Point:
        r = self.radius(theta)
        return (r * math.cos(theta), r * math.sin(theta))


def gamma_polyline(theta0: float, n_segments: int) -> np.ndarray:
    """Vertices of gamma on a uniform theta-mesh of [-theta0, theta0], from A' to A."""
    theta0 = check_angle(theta0)
    if n_segments < 2:
        raise DomainError(f"gamma_polyline needs at least 2 segments, got {n_segments}")
    theta = np.linspace(-theta0, theta0, n_segments + 1)
    return gamma_points_array(theta0, theta)


def polyline_length(points: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(points, axis=0), axis=1)))


def _checked_point(domain: DomainSpec, x) -> np.ndarray:
    pts = as_points(x)
    if not domain.contains(pts[0]):
        raise DomainError(f"point {tuple(pts[0])} lies outside the closure of Omega(theta0={domain.theta0:g})")
    return pts


def dist_to_boundary(domain: DomainSpec, x: Sequence[float]) -> float:
    """phi_0(x) = dist(x, boundary of Omega)."""
    pts = _checked_point(domain, x)
    return float(domain.boundary_distance_many(pts)[0])


def dist_to_boundary_union_circle(domain: DomainSpec, x: Sequence[float]) -> float:
    """phi(x) = dist(x, boundary of Omega union C)."""
    pts = _checked_point(domain, x)
    to_circle = abs(math.hypot(pts[0, 0], pts[0, 1]) - 1.0)
    return min(float(domain.boundary_distance_many(pts)[0]), to_circle)
