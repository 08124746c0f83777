"""Exception hierarchy shared by every module.

Library code raises these; only the CLI turns them into exit codes.
"""

from typing import Optional, Sequence


class EikonalLinesError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(EikonalLinesError, ValueError):
    """An argument lies outside its admissible set."""


class AmbiguityError(EikonalLinesError):
    """A field was queried on one of its jump curves or singular points."""

    def __init__(self, curve_name: str, point):
        self.curve_name = curve_name
        self.point = tuple(float(c) for c in point)
        super().__init__(
            f"point ({self.point[0]:.12g}, {self.point[1]:.12g}) lies on '{curve_name}'; "
            "traces are curve data, query a side of the curve instead"
        )


class QuadratureEvaluationError(EikonalLinesError):
    """The integrand returned a non-finite sample."""

    def __init__(self, abscissa: float, value: float):
        self.abscissa = float(abscissa)
        self.value = float(value)
        super().__init__(f"integrand is not finite at x={self.abscissa!r} (value {self.value!r})")


class QuadratureAccuracyError(EikonalLinesError):
    """Subdivision depth exhausted before the tolerance was met."""

    def __init__(self, value: float, error_estimate: float, tol: float):
        self.value = value
        self.error_estimate = error_estimate
        self.tol = tol
        super().__init__(
            f"quadrature did not reach tol={tol:g}: best value {value!r}, "
            f"error estimate {error_estimate:g}"
        )


class BracketSearchError(EikonalLinesError):
    """No sign change of the energy gap was found on the scanned mesh."""

    def __init__(self, message: str, mesh: Sequence[float], gaps: Sequence[float]):
        self.mesh = list(mesh)
        self.gaps = list(gaps)
        super().__init__(message)

    def report(self) -> str:
        lines = [str(self), "scanned mesh (theta0, gap):"]
        lines.extend(f"  {theta:.6e}  {gap:+.6e}" for theta, gap in zip(self.mesh, self.gaps))
        return "\n".join(lines)


class RepositionError(EikonalLinesError):
    """A flux rectangle has an edge lying along a jump curve."""

    def __init__(self, rectangle, curve_name: Optional[str] = None):
        self.rectangle = tuple(rectangle)
        self.curve_name = curve_name
        where = f" '{curve_name}'" if curve_name else ""
        super().__init__(f"rectangle {self.rectangle} has an edge along jump curve{where}; move it")


class IndeterminateGapError(EikonalLinesError):
    """Both energies are infinite, so their difference is undefined."""
