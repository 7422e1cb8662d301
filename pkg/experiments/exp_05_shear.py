"""Translated divergent orbits u_{ℓ/m} a(t) u_n over the window [0, ln(max(1, n)·m)]."""

from typing import Annotated

from orbit_sdk import ExperimentTable, experiment, modulus
from orbit_sdk.config import get_settings
from orbit_sdk.parallel import ordered_map
from orbitlab.hyperbolic import FCellGrid, orbit_time_span, translated_orbit_sample

from experiments.exp_04_horocycle import cell_rows
from experiments.models import CellRow


@experiment(name="shear", stochastic=True)
def shear(
    n: int,
    m: Annotated[int, modulus()],
    samples_per_unit_time: int = 20_000,
    seed: int = 0,
) -> ExperimentTable:
    """F-cell histogram of the translated orbit against the Haar reference."""
    grid = FCellGrid()
    cloud = translated_orbit_sample(
        n,
        m,
        samples_per_unit_time,
        seed,
        chunk_size=get_settings().chunk_size,
        map_fn=ordered_map,
    )
    counts = grid.histogram(cloud.xs, cloud.ys)
    rows = [
        CellRow(cell_re=re, cell_im=im, observed=obs, expected=exp)
        for re, im, obs, exp in cell_rows(grid, counts)
    ]
    return ExperimentTable.from_models(
        CellRow,
        rows,
        summary={
            "tv": grid.tv_distance(counts),
            "span": orbit_time_span(n, m),
            "samples": len(cloud),
        },
    )
