"""Configuration management for pfrkit."""

import json
import sys
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class EnumerationConfig(BaseModel):
    """Lattice enumeration limits."""
    limit: int = 10_000_000

    @field_validator("limit")
    @classmethod
    def validate_limit(cls, v):
        if v < 1:
            raise ValueError("limit must be >= 1")
        return v


class MonteCarloConfig(BaseModel):
    """Monte Carlo sampling configuration."""
    samples: int = 100_000
    seed: int = 0
    block_size: int = 8192
    workers: int = 1  # threads over sample blocks; results do not depend on it

    @field_validator("samples", "block_size", "workers")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v):
        if v < 0:
            raise ValueError("seed must be >= 0")
        return v


class FittingConfig(BaseModel):
    """Ellipsoid fitting configuration."""
    eps: float = 1e-3
    max_iterations: int = 10_000
    samples_per_dim: int = 1000
    snap_bits: int = 48

    @field_validator("eps")
    @classmethod
    def validate_eps(cls, v):
        if v <= 0:
            raise ValueError("eps must be > 0")
        return v


class MinkowskiConfig(BaseModel):
    """Minkowski-sum membership configuration."""
    tol: float = 1e-6
    steps_per_dim: int = 200

    @field_validator("tol")
    @classmethod
    def validate_tol(cls, v):
        if v <= 0:
            raise ValueError("tol must be > 0")
        return v


class GaussianConfig(BaseModel):
    """Gaussian density configuration."""
    tail_eps: float = 1e-10

    @field_validator("tail_eps")
    @classmethod
    def validate_tail_eps(cls, v):
        if v <= 0:
            raise ValueError("tail_eps must be > 0")
        return v


class TransferConfig(BaseModel):
    """Convex-to-ellipsoid transfer configuration."""
    target: Literal["ellipsoid", "skew"] = "ellipsoid"
    check_volume_bounds: bool = True
    rbm_grid: List[Tuple[float, float]] = Field(default_factory=list)


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = "WARNING"
    file: Optional[str] = None
    max_size_mb: int = 10
    backup_count: int = 5


class Config(BaseModel):
    """Main configuration model."""
    enumeration: EnumerationConfig = Field(default_factory=EnumerationConfig)
    monte_carlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    fitting: FittingConfig = Field(default_factory=FittingConfig)
    minkowski: MinkowskiConfig = Field(default_factory=MinkowskiConfig)
    gaussian: GaussianConfig = Field(default_factory=GaussianConfig)
    transfer: TransferConfig = Field(default_factory=TransferConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


class EnvSettings(BaseSettings):
    """Environment overrides (PFRKIT_CONFIG, PFRKIT_LOG_LEVEL), also read from .env."""
    model_config = SettingsConfigDict(env_prefix="PFRKIT_", env_file=".env", extra="ignore")

    config: Optional[Path] = None
    log_level: Optional[str] = None


class ConfigManager:
    """Manages application configuration."""

    def __init__(self, config_path: Optional[Path] = None):
        """Initialize configuration manager.

        Args:
            config_path: Path to config file. Defaults to PFRKIT_CONFIG, then built-in defaults.
        """
        self.env = EnvSettings()
        self.config_path = config_path or self.env.config
        self._config: Optional[Config] = None

    def load(self) -> Config:
        """Load configuration from file.

        Returns:
            Loaded configuration.

        Raises:
            FileNotFoundError: If config file doesn't exist.
            pydantic.ValidationError: If config is invalid.
        """
        if self.config_path is None or not Path(self.config_path).exists():
            raise FileNotFoundError(
                f"Configuration file not found: {self.config_path}\n"
                "Run 'python pfr.py init-config --out config.json' to create one."
            )

        with open(self.config_path, "r", encoding="utf-8") as f:
            config_data = json.load(f)

        self._config = self._apply_env(Config(**config_data))
        return self._config

    def load_or_default(self) -> Config:
        """Load the config file if one is configured, otherwise use defaults."""
        if self.config_path is None:
            self._config = self._apply_env(Config())
            return self._config
        return self.load()

    def get(self) -> Config:
        """Get current configuration.

        Raises:
            RuntimeError: If config hasn't been loaded.
        """
        if self._config is None:
            raise RuntimeError("Configuration not loaded. Call load() first.")
        return self._config

    def save(self, config: Config) -> None:
        """Save configuration to file."""
        with open(self.config_path, "w", encoding="utf-8") as f:
            json.dump(config.model_dump(), f, indent=2)
        self._config = config

    def _apply_env(self, config: Config) -> Config:
        if self.env.log_level:
            config.logging.level = self.env.log_level.upper()
        return config

    @staticmethod
    def create_default_config(output_path: Path) -> None:
        """Create a default configuration file.

        Args:
            output_path: Path where to create the config file.
        """
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(Config().model_dump(), f, indent=2)


def setup_logging(log_config: LoggingConfig) -> None:
    """Route loguru output: stderr at the configured level, optional rotating file."""
    logger.remove()
    logger.add(
        sys.stderr,
        level=log_config.level,
        format="<level>{level}</level>: {message}",
    )

    if log_config.file:
        log_file = Path(log_config.file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_file,
            level="DEBUG",
            rotation=f"{log_config.max_size_mb} MB",
            retention=log_config.backup_count,
            format="{time:YYYY-MM-DD HH:mm:ss} | {level} | {name}:{function} | {message}",
        )
