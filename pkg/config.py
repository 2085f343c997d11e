"""Experiment configuration for eikolab."""
from __future__ import annotations
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config_utils import load_config_file, load_env_config, merge_configs
from lab.errors import ConfigError, ResolutionError
from lab.fields import MIN_CELLS_PER_SCALE

CONFIG_DIR = Path.home() / ".eikolab"
CONFIG_FILE = CONFIG_DIR / ".env"
ENV_PREFIX = 'EIKONAL_LAB_'

DYADIC_SCALES = [2.0 ** -7, 2.0 ** -6, 2.0 ** -5, 2.0 ** -4]

logger = logging.getLogger(__name__)


class Tolerances(BaseModel):
    """Acceptance thresholds; defaults are the published acceptance values."""

    model_config = ConfigDict(extra='forbid')

    xi_relative: float = 1e-3
    xi_continuity: float = 1e-12
    xi_random_angles: int = 50
    coercivity_floor: float = 1.0
    coercivity_limit_relative: float = 0.01
    coercivity_endpoint: float = 1e-10
    exponent: float = 0.1
    scaling_exponent: float = 0.15
    entropy_coefficient: float = 1e-10
    entropy_defect: float = 1e-8
    entropy_random_polynomials: int = 100
    production_relative: float = 0.05
    lub_frames: int = 64
    cost_at_two: float = 1.6843
    cost_absolute: float = 1e-3
    cost_ratio_relative: float = 0.02
    pairing: float = 1e-6
    pairing_random_cases: int = 20
    kinetic_l1: float = 1e-3
    kinetic_refinement: float = 1.7
    vortex_refinement: float = 1.5
    low_mode: float = 1e-3
    quartic_pairs: int = 1_000_000
    quartic_digits: int = 3
    besov_ratio: float = 1.3
    besov_exponent: float = 0.05

    @field_validator('*')
    @classmethod
    def _positive(cls, value: Any) -> Any:
        if value <= 0:
            raise ValueError('tolerances must be positive')
        return value


class ExperimentConfig(BaseModel):
    """Grid, scales and sampling for one experiment run.

    All lengths are in units of the square side ``length``.
    """

    model_config = ConfigDict(extra='forbid')

    n: int = Field(256, ge=16, le=8192)
    length: float = Field(1.0, gt=0.0)
    margin: float = Field(0.15, ge=0.0, lt=0.5)
    epsilons: List[float] = Field(default_factory=lambda: list(DYADIC_SCALES))
    hs: List[float] = Field(default_factory=lambda: list(DYADIC_SCALES))
    ts: List[float] = Field(default_factory=lambda: list(DYADIC_SCALES))
    angular_samples: int = Field(4096, ge=256)
    dictionary_size: int = Field(4, ge=1, le=64)
    dictionary_random: int = Field(8, ge=0)
    seed: int = 0
    output_dir: str = 'eikolab-out'
    threads: Optional[int] = Field(None, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @field_validator('epsilons', 'hs', 'ts')
    @classmethod
    def _scales(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError('scale lists must not be empty')
        if any(not math.isfinite(v) or v <= 0.0 for v in values):
            raise ValueError('scales must be positive and finite')
        return sorted(values)

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    def check_resolution(self) -> None:
        """Every epsilon, h and t must span at least two grid spacings.

        Raises:
            ResolutionError: naming the first offending scale
        """
        floor = MIN_CELLS_PER_SCALE * self.spacing * (1.0 - 1e-12)
        for name in ('epsilons', 'hs', 'ts'):
            for value in getattr(self, name):
                if value < floor:
                    raise ResolutionError(
                        f"{name[:-1]}={value:.6g} is below {MIN_CELLS_PER_SCALE:g} grid spacings "
                        f"at N={self.n} (h={self.spacing:.6g})")
        if max(self.ts) > self.length / 4.0:
            raise ResolutionError(f"t={max(self.ts):.6g} exceeds L/4")


def load_dotenv_file() -> None:
    """Load ~/.eikolab/.env into the environment when it exists."""
    if CONFIG_FILE.exists():
        load_dotenv(CONFIG_FILE, override=False)


def load_experiment_config(path: Optional[str] = None,
                           overrides: Optional[Dict[str, Any]] = None,
                           check_resolution: bool = True) -> ExperimentConfig:
    """Resolve the configuration with priority CLI > environment > file > defaults.

    Raises:
        ConfigError: unreadable file or schema violation
        ResolutionError: a scale below two grid spacings
    """
    load_dotenv_file()
    defaults = ExperimentConfig().model_dump()
    file_config = load_config_file(Path(path)) if path else {}
    env_config = load_env_config(ENV_PREFIX, defaults)
    merged = merge_configs(defaults, env_config, file_config, overrides)
    try:
        config = ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        first = e.errors()[0]
        location = '.'.join(str(part) for part in first['loc'])
        raise ConfigError(f"invalid config: {location}: {first['msg']}") from e
    if check_resolution:
        config.check_resolution()
    logger.debug("config: N=%d margin=%.3g seed=%d", config.n, config.margin, config.seed)
    return config
