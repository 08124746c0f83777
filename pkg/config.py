"""
Run configuration for the CLI commands.

Values are merged with the precedence: command-line flags, then the
`--config` file (flat `key = value` text), then the environment
(EIKONAL_LINES_TOL, also read from a .env file), then the defaults below.
"""

import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from constants import DEFAULT_TOL, TOL_ENV_VAR
from errors import DomainError
from util import parse_float_list, parse_int_list, read_key_value_file

logger = logging.getLogger(__name__)

DEFAULT_COST = "power:0.5"


def _check_theta(value: float) -> float:
    if not (0.0 < value < math.pi / 2):
        raise ValueError(f"angles must lie in (0, pi/2), got {value!r}")
    return value


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cost: str = DEFAULT_COST
    theta0: Optional[float] = None
    thetas: List[float] = []
    grid_file: Optional[Path] = None
    p: Optional[float] = None
    ns: List[int] = [1, 2, 4, 8]
    n: int = 4
    grid: int = 128
    tol: float = DEFAULT_TOL
    seed: int = 0
    rectangles: int = 1000
    out: Optional[Path] = None

    @field_validator("thetas", mode="before")
    @classmethod
    def split_thetas(cls, value: Any) -> Any:
        return parse_float_list(value) if isinstance(value, str) else value

    @field_validator("ns", mode="before")
    @classmethod
    def split_ns(cls, value: Any) -> Any:
        return parse_int_list(value) if isinstance(value, str) else value

    @field_validator("theta0")
    @classmethod
    def check_theta0(cls, value: Optional[float]) -> Optional[float]:
        return None if value is None else _check_theta(value)

    @field_validator("thetas")
    @classmethod
    def check_thetas(cls, value: List[float]) -> List[float]:
        return [_check_theta(theta) for theta in value]

    @field_validator("tol")
    @classmethod
    def check_tol(cls, value: float) -> float:
        if not value > 0:
            raise ValueError(f"tolerance must be positive, got {value!r}")
        return value

    @field_validator("ns")
    @classmethod
    def check_ns(cls, value: List[int]) -> List[int]:
        if any(n < 1 for n in value):
            raise ValueError(f"every n must be a positive integer, got {value}")
        return value

    @field_validator("n", "rectangles")
    @classmethod
    def check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"must be a positive integer, got {value}")
        return value

    @field_validator("grid")
    @classmethod
    def check_grid(cls, value: int) -> int:
        if value < 2:
            raise ValueError(f"grid resolution must be at least 2, got {value}")
        return value

    def require_theta0(self) -> float:
        if self.theta0 is None:
            raise DomainError("theta0 is required (flag --theta0 or config key 'theta0')")
        return self.theta0


def load_run_config(flags: Dict[str, Any], config_path: Optional[Path] = None) -> RunConfig:
    """Merge flags (None means unset) over the config file over the environment."""
    load_dotenv()
    values: Dict[str, Any] = {}
    env_tol = os.environ.get(TOL_ENV_VAR)
    if env_tol:
        values["tol"] = env_tol
    if config_path is not None:
        values.update(read_key_value_file(config_path))
    values.update({key: value for key, value in flags.items() if value is not None})
    try:
        config = RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in e.errors()
        )
        raise DomainError(f"invalid configuration: {problems}") from e
    logger.debug(f"run config: {config.model_dump()}")
    return config
