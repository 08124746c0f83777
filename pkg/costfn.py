"""
Jump costs f: [0, 2] -> [0, +inf] and the necessary condition on f.

A cost is either a power t^p or a piecewise-linear table read from a CSV file
with header `t,value`. The condition checked by `cnf_check` is

    limsup_{t->0} f(t)/t  <=  2 limsup_{t->2} f(t)

which every cost must satisfy for the line energy to be lower semicontinuous.
f(0) is evaluated like any other point but never reaches an energy: a zero
jump carries no curve.
"""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from constants import MIN_CNF_SAMPLES, CostKind
from errors import DomainError

logger = logging.getLogger(__name__)

JUMP_MIN = 0.0
JUMP_MAX = 2.0


@dataclass(frozen=True)
class JumpCost:
    kind: CostKind
    label: str
    exponent: float = 0.0
    knots: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind is CostKind.POWER:
            if not (self.exponent > 0 and math.isfinite(self.exponent)):
                raise DomainError(f"power cost needs a positive finite exponent, got {self.exponent!r}")
        else:
            _validate_knots(self.knots)

    @classmethod
    def power(cls, p: float) -> "JumpCost":
        p = float(p)
        return cls(kind=CostKind.POWER, label=f"power:{p:g}", exponent=p)

    @classmethod
    def table(cls, knots: Sequence[Tuple[float, float]], label: str = "table") -> "JumpCost":
        return cls(
            kind=CostKind.TABLE,
            label=label,
            knots=tuple((float(t), float(v)) for t, v in knots),
        )

    @classmethod
    def zero(cls) -> "JumpCost":
        return cls.table([(JUMP_MIN, 0.0), (JUMP_MAX, 0.0)], label="zero")

    @classmethod
    def sampled(cls, f: Union["JumpCost", Callable[[float], float]], knot_count: int) -> "JumpCost":
        """Tabulate `f` at `knot_count` uniform knots of [0, 2]."""
        if knot_count < 2:
            raise DomainError(f"a table needs at least 2 knots, got {knot_count}")
        ts = np.linspace(JUMP_MIN, JUMP_MAX, knot_count)
        label = f"table({getattr(f, 'label', 'f')},{knot_count})"
        return cls.table([(t, float(f(t))) for t in ts], label=label)

    @property
    def is_power(self) -> bool:
        return self.kind is CostKind.POWER

    def __call__(self, t: float) -> float:
        return eval_cost(self, t)

    def evaluate(self, t) -> np.ndarray:
        """Vectorized evaluation on an array of jump sizes (no domain check)."""
        t = np.asarray(t, dtype=float)
        if self.is_power:
            return np.power(t, self.exponent)
        return _interpolate(self.knots, t)


def _validate_knots(knots: Tuple[Tuple[float, float], ...]) -> None:
    if len(knots) < 2:
        raise DomainError(f"a table cost needs at least 2 knots, got {len(knots)}")
    ts = [t for t, _ in knots]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise DomainError("table knots must be strictly increasing in t")
    if ts[0] > JUMP_MIN or ts[-1] < JUMP_MAX:
        raise DomainError(f"table knots must cover [0, 2], got [{ts[0]}, {ts[-1]}]")
    for t, v in knots:
        if math.isnan(v) or v < 0:
            raise DomainError(f"table value at t={t} must be non-negative, got {v}")


def _interpolate(knots, t: np.ndarray) -> np.ndarray:
    ts = np.array([k[0] for k in knots])
    vs = np.array([k[1] for k in knots])
    hi = np.clip(np.searchsorted(ts, t, side="right"), 1, len(ts) - 1)
    lo = hi - 1
    w = (t - ts[lo]) / (ts[hi] - ts[lo])
    with np.errstate(invalid="ignore"):
        # (1-w)*v_lo + w*v_hi keeps +inf knots infinite on their open neighbour intervals
        mixed = (1.0 - w) * vs[lo] + w * vs[hi]
    return np.where(w <= 0.0, vs[lo], np.where(w >= 1.0, vs[hi], mixed))


def eval_cost(f: JumpCost, t: float) -> float:
    """f(t) for a jump size t in [0, 2]."""
    t = float(t)
    if not (JUMP_MIN <= t <= JUMP_MAX):
        raise DomainError(f"jump size must lie in [0, 2], got {t!r}")
    if f.is_power:
        return math.pow(t, f.exponent)
    return float(_interpolate(f.knots, np.array([t]))[0])


@dataclass(frozen=True)
class CnfMargin:
    lhs: float
    rhs: float
    holds: bool
    samples_used: int


def cnf_check(f: JumpCost, sample_count: int = 1024) -> CnfMargin:
    """
    Decide limsup_{t->0} f(t)/t <= 2 limsup_{t->2} f(t).

    Power costs are decided analytically. Tables maximize over the geometric
    meshes t = 2*2^-k and t = 2 - 2^-k, k = 1..log2(sample_count), which catches
    one-sided limsups without assuming monotonicity.
    """
    if sample_count < MIN_CNF_SAMPLES:
        raise DomainError(f"cnf_check needs at least {MIN_CNF_SAMPLES} samples, got {sample_count}")

    if f.is_power:
        p = f.exponent
        if p > 1:
            lhs = 0.0
        elif p == 1:
            lhs = 1.0
        else:
            lhs = math.inf
        rhs = 2.0 * math.pow(2.0, p)
        # the two analytic limits
        samples_used = 2
    else:
        levels = int(math.floor(math.log2(sample_count)))
        k = np.arange(1, levels + 1, dtype=float)
        near_zero = 2.0 * np.power(2.0, -k)
        near_two = 2.0 - np.power(2.0, -k)
        lhs = float(np.max(f.evaluate(near_zero) / near_zero))
        rhs = 2.0 * float(np.max(f.evaluate(near_two)))
        samples_used = 2 * levels
        logger.debug(f"cnf_check({f.label}): {levels} mesh levels, lhs={lhs:g}, rhs={rhs:g}")

    return CnfMargin(lhs=lhs, rhs=rhs, holds=lhs <= rhs, samples_used=samples_used)


def read_table_csv(path: Path) -> JumpCost:
    path = Path(path)
    if not path.exists():
        raise DomainError(f"cost table {path} does not exist")
    knots = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [name.strip() for name in reader.fieldnames] != ["t", "value"]:
            raise DomainError(f"{path}: expected CSV header 't,value', got {reader.fieldnames}")
        for line_number, row in enumerate(reader, start=2):
            try:
                knots.append((float(row["t"]), float(row["value"])))
            except (TypeError, ValueError) as e:
                raise DomainError(f"{path}:{line_number}: malformed row {row}") from e
    return JumpCost.table(knots, label=f"table:{path}")


def parse_cost(spec: str) -> JumpCost:
    """
    Parse the config grammar `power:<p>` or `table:<path>`; `zero` is the
    identically-zero table.
    """
    spec = spec.strip()
    if spec == "zero":
        return JumpCost.zero()
    kind, sep, argument = spec.partition(":")
    if not sep or not argument:
        raise DomainError(f"cost must look like 'power:<p>' or 'table:<path>', got {spec!r}")
    if kind == CostKind.POWER.value:
        try:
            p = float(argument)
        except ValueError as e:
            raise DomainError(f"bad exponent in cost spec {spec!r}") from e
        return JumpCost(kind=CostKind.POWER, label=spec, exponent=p)
    if kind == CostKind.TABLE.value:
        return read_table_csv(Path(argument))
    raise DomainError(f"unknown cost kind {kind!r} in {spec!r}")
