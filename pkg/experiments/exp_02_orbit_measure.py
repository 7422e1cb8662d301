"""Family averages ν_m / ν̃_m and their distance to the Gauss measure, swept over m."""

from functools import partial
from typing import Annotated

from orbit_sdk import ExperimentTable, experiment, modulus
from orbit_sdk.checkpoint import sweep
from orbit_sdk.config import get_settings
from orbitlab.measures import (
    FamilyMode,
    binned_tv_distance,
    family_average,
    kolmogorov_distance,
    near_gauss_fraction,
)

from experiments.models import AtomRow


def measure_table(m: int, mode: FamilyMode, threshold: float, bins: int) -> ExperimentTable:
    mu = family_average(m, mode)
    rows = [AtomRow(m=m, mode=mode.value, atom=str(x), weight=str(w)) for x, w in mu.atoms]
    return ExperimentTable.from_models(
        AtomRow,
        rows,
        summary={
            f"kolmogorov.{m}": kolmogorov_distance(mu),
            f"tv.{m}": binned_tv_distance(mu, bins),
            f"near_gauss.{m}": near_gauss_fraction(m, threshold),
        },
    )


@experiment(name="orbit-measure", sweep=True)
def orbit_measure(
    m: Annotated[list[int], modulus()],
    mode: FamilyMode = FamilyMode.ORBIT_UNIFORM,
    threshold: float = 0.05,
) -> ExperimentTable:
    """Atoms of ν_m with Kolmogorov and binned TV distance to Gauss."""
    compute = partial(measure_table, mode=mode, threshold=threshold, bins=get_settings().tv_bins)
    return ExperimentTable.concat(sweep(m, compute))
