"""Shared fixtures; puts src/ on the import path."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest  # noqa: E402
from loguru import logger  # noqa: E402

from pfrkit.core.config import Config, FittingConfig, MonteCarloConfig  # noqa: E402
from pfrkit.modules.bodies import SymmetricBody  # noqa: E402


@pytest.fixture
def unit_disk() -> SymmetricBody:
    return SymmetricBody.ellipsoid([[1, 0], [0, 1]])


@pytest.fixture
def unit_square() -> SymmetricBody:
    return SymmetricBody.box([1, 1])


@pytest.fixture
def cross_polytope() -> SymmetricBody:
    """|x1 + x2| <= 1, |x1 - x2| <= 1."""
    return SymmetricBody.polytope([[1, 1], [1, -1]])


@pytest.fixture
def fast_config() -> Config:
    """Small sample counts so pipeline tests stay quick."""
    return Config(
        monte_carlo=MonteCarloConfig(samples=20_000, seed=1),
        fitting=FittingConfig(samples_per_dim=400),
    )


@pytest.fixture(autouse=True)
def _reset_logger():
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")
