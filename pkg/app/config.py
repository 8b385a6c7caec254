import logging
from pathlib import Path

from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


logger = logging.getLogger(__name__)


class CustomSettings(BaseSettings):
    """Numerical defaults and runtime settings loaded from environment variables.

    Every service accepts explicit overrides; these values are only the fallbacks.
    """

    cache_dir: Path = Path(".le_cache")
    cache_enabled: bool = True
    workers: int = 1
    log_level: str = "INFO"
    profile_nodes: int = 2048  # Nodes per side of the reduced profile grid
    steady_nodes: int = 1201
    slow_nodes: int = 4097
    slow_modes: int = 256
    tail_factor: int = 16  # Asymptotic tail is summed explicitly up to tail_factor * slow_modes
    eps_samples: str = "0.08,0.04,0.02"
    eps_start: float = 0.08
    newton_tol: float = 1e-10
    root_tol: float = 1e-12
    hopf_scan_points: int = 512
    hopf_scan_max_points: int = 32768
    dense_eig_max: int = 1600  # Largest unknown count solved with a dense eigensolver

    model_config = SettingsConfigDict(
        env_prefix="LE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, value: str) -> str:
        """Accept standard logging level names only."""
        level = value.strip().upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Invalid log level '{value}'")
        return level

    @field_validator("workers", "hopf_scan_points", "hopf_scan_max_points", "tail_factor")
    @classmethod
    def validate_positive_counts(cls, value: int, info) -> int:
        """Ensure counts are positive integers."""
        if value <= 0:
            raise ValueError(f"{info.field_name} must be > 0")
        return value

    @field_validator("profile_nodes", "steady_nodes", "slow_nodes")
    @classmethod
    def validate_grid_sizes(cls, value: int, info) -> int:
        """Grids below 256 nodes cannot resolve the layer."""
        if value < 256:
            raise ValueError(f"{info.field_name} must be >= 256")
        return value

    @field_validator("eps_samples")
    @classmethod
    def validate_eps_samples(cls, value: str) -> str:
        """Parse comma-separated eps values; they must decrease strictly."""
        samples = _parse_float_list(value)
        if len(samples) < 3:
            raise ValueError("eps_samples needs at least 3 values for extrapolation")
        if any(sample <= 0 for sample in samples):
            raise ValueError("eps_samples must be positive")
        if any(later >= earlier for earlier, later in zip(samples, samples[1:])):
            raise ValueError("eps_samples must be strictly decreasing")
        return value

    @field_validator("eps_start", "newton_tol", "root_tol")
    @classmethod
    def validate_positive_floats(cls, value: float, info) -> float:
        if value <= 0:
            raise ValueError(f"{info.field_name} must be > 0")
        return value

    @model_validator(mode="after")
    def validate_spectral_resolution(self):
        """Keep the retained modes well inside the resolved part of the grid."""
        if self.slow_modes * 4 > self.slow_nodes:
            raise ValueError("slow_modes must be at most slow_nodes / 4")
        if self.hopf_scan_max_points < self.hopf_scan_points:
            raise ValueError("hopf_scan_max_points must be >= hopf_scan_points")
        return self

    @property
    def eps_sample_values(self) -> tuple[float, ...]:
        return tuple(_parse_float_list(self.eps_samples))

    def __init__(self, **data):
        """Initialize settings and log configuration."""
        super().__init__(**data)

        logger.debug("Configuration loaded:")
        logger.debug("  Cache: %s (%s)", self.cache_dir, "enabled" if self.cache_enabled else "disabled")
        logger.debug("  Workers: %s", self.workers)
        logger.debug("  Profile nodes: %s, steady nodes: %s", self.profile_nodes, self.steady_nodes)
        logger.debug("  Slow operator: %s nodes, %s modes", self.slow_nodes, self.slow_modes)
        logger.debug("  Eps samples: %s", self.eps_samples)
        logger.debug("  Newton tolerance: %s, root tolerance: %s", self.newton_tol, self.root_tol)


def _parse_float_list(value: str) -> list[float]:
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise ValueError(f"Invalid list of numbers '{value}'") from exc


settings = CustomSettings()


def setup_logging(level: str | None = None) -> None:
    """Configure application logging."""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
