"""Settings from the ``[tool.orbitlab]`` table of pyproject.toml.

Example pyproject.toml:
    [tool.orbitlab]
    modules = ["experiments"]
    max_modulus = 1000000
    padic_precision = 64
"""

import os
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError

try:
    import tomllib
except ImportError:
    import tomli as tomllib  # type: ignore[import-not-found,no-redef]

from orbit_sdk.exceptions import ExperimentError
from orbit_sdk.logger import logger

THREADS_ENV = "ORBITLAB_THREADS"


class Settings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    modules: List[str] = Field(default_factory=lambda: ["experiments"])
    """Modules imported to register experiments."""
    max_modulus: PositiveInt = 1_000_000
    """Largest m any experiment accepts."""
    padic_precision: PositiveInt = 64
    """Default number of m-adic digits."""
    tv_bins: PositiveInt = 64
    """Bins of the binned total-variation diagnostic on [0, 1]."""
    kuzmin_kmax: PositiveInt = 30
    """Partial quotients above this value share one tail bucket."""
    shear_epsilon: float = Field(default=0.1, gt=0, lt=0.5)
    """The ε of the windowed shear budget."""
    chunk_size: PositiveInt = 16_384
    """Samples per RNG stream."""


def read_pyproject(pyproject_path: Path) -> dict:
    try:
        with open(pyproject_path, "rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ExperimentError(f"Failed to parse {pyproject_path}: {e}") from e


def load_settings(pyproject_path: Optional[Path] = None) -> Settings:
    """Read ``[tool.orbitlab]``; a missing file or table gives the defaults."""
    pyproject_path = pyproject_path or Path.cwd() / "pyproject.toml"
    if not pyproject_path.exists():
        logger.debug(f"No {pyproject_path}; using default settings")
        return Settings()

    table = read_pyproject(pyproject_path).get("tool", {}).get("orbitlab", {})
    try:
        return Settings.model_validate(table)
    except ValidationError as e:
        raise ExperimentError(f"Invalid [tool.orbitlab] configuration: {e}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()


def worker_count() -> int:
    """Worker processes from ``ORBITLAB_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        raise ExperimentError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if count < 1:
        raise ExperimentError(f"{THREADS_ENV} must be a positive integer, got {count}")
    return count
