import math
from enum import Enum


class CostKind(Enum):
    POWER = "power"
    TABLE = "table"


class FieldKind(Enum):
    VISCOSITY = "viscosity"
    COMPETITOR = "competitor"
    ONE_D = "one_d"
    TILE = "tile"
    TILING = "tiling"


class Verdict(Enum):
    COMPETITOR_WINS = "COMPETITOR WINS"
    VISCOSITY_WINS = "VISCOSITY WINS"


class CertificateStatus(Enum):
    PASSED = "PASSED"
    FAILED = "FAILED"


TOL_ENV_VAR = "EIKONAL_LINES_TOL"

DEFAULT_TOL = 1e-10
MIN_BISECTION_TOL = 1e-12
# membership / on-boundary predicates; all constructions live at unit scale
BOUNDARY_TOL = 1e-12
# evaluation refuses points closer than this to a jump curve or singular point
CURVE_BAND = 1e-9
DEFAULT_SIDE_OFFSET = 1e-6
MIN_CNF_SAMPLES = 16

GAUSS_LEGENDRE_ORDER = 10
MAX_QUADRATURE_DEPTH = 48

# geometric scan (pi/4) * 2^-k, k = 0..CRITICAL_SCAN_STEPS
CRITICAL_SCAN_START = math.pi / 4
CRITICAL_SCAN_STEPS = 40
# below-scan extension for exponents close to 1 halves down to this angle
CRITICAL_SCAN_FLOOR = 1e-300
MAX_BISECTION_ITERATIONS = 200

ENERGY_CSV_HEADER = [
    "theta0",
    "cost",
    "I1",
    "I2",
    "I3",
    "E_viscosity",
    "E_competitor",
    "gap",
    "quad_err",
]
SWEEP_CSV_HEADER = ["theta0", "gap", "E_viscosity", "E_competitor", "I1", "I2", "I3"]
LSC_CSV_HEADER = ["n", "energy", "l1_distance"]
CRITICAL_CSV_HEADER = [
    "p",
    "theta_star",
    "bracket_lo",
    "bracket_hi",
    "gap_at_lo",
    "gap_at_hi",
    "iterations",
    "crossings",
]
CHECK_CSV_HEADER = ["field", "certificate", "value", "threshold", "passed"]
RASTER_CSV_HEADER = ["x", "y", "mx", "my", "mask"]
