"""
Decision procedures built on the energies: the critical angle of a power cost,
theta0 sweeps, and the lower-semicontinuity report for the tiling sequence.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

from constants import (
    CRITICAL_SCAN_FLOOR,
    CRITICAL_SCAN_START,
    CRITICAL_SCAN_STEPS,
    DEFAULT_TOL,
    MAX_BISECTION_ITERATIONS,
    MIN_BISECTION_TOL,
)
from costfn import JumpCost, eval_cost
from energy import GapSummary, energy_gap, line_energy, summarize_gap
from errors import BracketSearchError, DomainError
from fields import one_d_transition, tiling_field
from geometry import check_angle, kite_area
from raster import l1_distance

logger = logging.getLogger(__name__)

# the gap near the bottom of the scan is O(sqrt(theta)) small, so the
# quadrature runs well below the bisection tolerance
CRITICAL_QUADRATURE_TOL = 1e-13


@dataclass(frozen=True)
class CriticalAngleResult:
    p: float
    theta_star: float
    bracket: Tuple[float, float]
    gap_at_lo: float
    gap_at_hi: float
    iterations: int
    crossings: int
    mesh_size: int

    def csv_row(self) -> list:
        return [
            self.p,
            self.theta_star,
            self.bracket[0],
            self.bracket[1],
            self.gap_at_lo,
            self.gap_at_hi,
            self.iterations,
            self.crossings,
        ]


def scan_mesh(start: float = CRITICAL_SCAN_START, steps: int = CRITICAL_SCAN_STEPS) -> List[float]:
    """Geometric mesh start * 2^-k, k = 0..steps, in increasing order."""
    return [start * 2.0**-k for k in range(steps, -1, -1)]


def _extend_below(gap: Callable[[float], float], start: float) -> List[Tuple[float, float]]:
    """Halve below `start` until the gap is negative or CRITICAL_SCAN_FLOOR is passed; increasing order."""
    samples = []
    theta = 0.5 * start
    while theta >= CRITICAL_SCAN_FLOOR:
        value = gap(theta)
        samples.append((theta, value))
        if value < 0:
            break
        theta *= 0.5
    logger.debug(f"scan extended by {len(samples)} halvings down to {theta:.3e}")
    return samples[::-1]


def critical_angle(p: float, tol: float = DEFAULT_TOL) -> CriticalAngleResult:
    """
    Locate theta* where the gap for f(t) = t^p changes sign from negative
    (competitor wins) to positive. The largest bracketed crossing on the scan is
    bisected; the number of sign changes seen on the scan is reported.

    For p < 1 the scan is extended below (pi/4) 2^-40 by halving until the
    gap turns negative, so exponents close to 1 still find their crossing.
    """
    if not p > 0:
        raise DomainError(f"exponent must be positive, got {p!r}")
    if tol < MIN_BISECTION_TOL:
        raise DomainError(f"bisection tolerance must be at least {MIN_BISECTION_TOL:g}, got {tol!r}")
    f = JumpCost.power(p)

    def gap(theta: float) -> float:
        return energy_gap(f, theta, CRITICAL_QUADRATURE_TOL)

    mesh = scan_mesh()
    gaps = [gap(theta) for theta in mesh]
    if p < 1 and gaps[0] >= 0:
        # t^p with p < 1 always loses near 0; the crossing sits near 4^(-1/(1-p))
        extension = _extend_below(gap, mesh[0])
        mesh = [theta for theta, _ in extension] + mesh
        gaps = [value for _, value in extension] + gaps
    crossings = sum(1 for a, b in zip(gaps, gaps[1:]) if (a < 0) != (b < 0))
    brackets = [k for k in range(len(mesh) - 1) if gaps[k] < 0 < gaps[k + 1]]
    if not brackets:
        raise BracketSearchError(
            f"no sign change of the energy gap for p={p:g} on ({mesh[0]:.3e}, {mesh[-1]:.3e})",
            mesh,
            gaps,
        )
    if crossings > 1:
        logger.warning(f"critical_angle(p={p:g}): {crossings} sign changes on the scan, using the largest")

    k = brackets[-1]
    lo, hi = mesh[k], mesh[k + 1]
    gap_lo, gap_hi = gaps[k], gaps[k + 1]
    # width relative to hi below 1, so crossings far under tol are still resolved
    width_tol = tol * min(1.0, hi)
    iterations = 0
    while hi - lo > width_tol and iterations < MAX_BISECTION_ITERATIONS:
        mid = 0.5 * (lo + hi)
        g = gap(mid)
        if g < 0:
            lo, gap_lo = mid, g
        else:
            hi, gap_hi = mid, g
        iterations += 1
        logger.debug(f"bisection {iterations}: [{lo!r}, {hi!r}]")

    return CriticalAngleResult(
        p=float(p),
        theta_star=0.5 * (lo + hi),
        bracket=(lo, hi),
        gap_at_lo=gap_lo,
        gap_at_hi=gap_hi,
        iterations=iterations,
        crossings=crossings,
        mesh_size=len(mesh),
    )


def sweep_gap(f: JumpCost, thetas: Sequence[float], tol: float = DEFAULT_TOL) -> List[GapSummary]:
    """One row per theta0, in input order."""
    for theta in thetas:
        check_angle(theta)
    return [summarize_gap(f, theta, tol) for theta in thetas]


def count_sign_changes(rows: Sequence[GapSummary]) -> int:
    return sum(1 for a, b in zip(rows, rows[1:]) if (a.gap < 0) != (b.gap < 0))


@dataclass(frozen=True)
class LscRow:
    n: int
    energy: float
    l1_distance: float
    l1_error: float
    # |m_n - m_0| <= 2 on the support
    l1_bound: float


@dataclass
class LscReport:
    theta0: float
    cost: str
    energy_of_1d: float
    rows: List[LscRow] = field(default_factory=list)

    @property
    def limit_energy(self) -> float:
        return self.rows[-1].energy

    @property
    def margin(self) -> float:
        """E(1D) - E(m_n); positive when the limit loses energy."""
        return self.energy_of_1d - self.limit_energy

    @property
    def lsc_violated(self) -> bool:
        return all(row.energy < self.energy_of_1d for row in self.rows)


def tiling_support_area(theta0: float, n: int) -> float:
    """Area where m_n differs from the 1D transition: n kites scaled by cos(theta0) / n."""
    return n * kite_area(theta0) * (math.cos(theta0) / n) ** 2


def tiling_band(theta0: float, n: int) -> Tuple[float, float, float, float]:
    """Bounds covering the support of m_n - m_0: |x2| <= sin theta0 cos theta0 / n."""
    # a scaled kite has diagonals 1/n and 2h, so the n kites cover area exactly h
    h = tiling_support_area(theta0, n)
    return (0.0, 1.0, -h, h)


def lsc_report(
    theta0: float,
    f: JumpCost,
    ns: Sequence[int],
    grid: int = 128,
    tol: float = DEFAULT_TOL,
) -> LscReport:
    """
    For each n: the line energy of m_n and its L1 distance to the 1D transition.
    The raster uses grid * n columns over the band of height 2 sin theta0 cos theta0 / n,
    so every tile is sampled on the same local lattice.
    """
    theta0 = check_angle(theta0)
    if not ns:
        raise DomainError("lsc_report needs at least one n")
    if grid < 2:
        raise DomainError(f"grid resolution must be at least 2, got {grid}")

    reference = one_d_transition(theta0)
    report = LscReport(
        theta0=theta0,
        cost=f.label,
        energy_of_1d=eval_cost(f, 2.0 * math.sin(theta0)),
    )
    for n in ns:
        if n < 1:
            raise DomainError(f"tiling needs n >= 1, got {n}")
        field_n = tiling_field(theta0, n)
        energy = line_energy(field_n, f, tol).total
        distance, error = l1_distance(field_n, reference, tiling_band(theta0, n), grid * n, grid)
        bound = 2.0 * tiling_support_area(theta0, n)
        report.rows.append(LscRow(n=n, energy=energy, l1_distance=distance, l1_error=error, l1_bound=bound))
        logger.debug(f"lsc n={n}: energy={energy!r}, l1={distance!r}")
    return report
