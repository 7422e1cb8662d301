"""Expanding horocycles u_x a(t)·i against the hyperbolic area of F."""

import numpy as np

from orbit_sdk import ExperimentTable, experiment
from orbit_sdk.config import get_settings
from orbit_sdk.logger import logger
from orbit_sdk.parallel import ordered_map
from orbitlab.hyperbolic import FCellGrid, expanding_horocycle_sample

from experiments.models import HorocycleCellRow


def cell_rows(grid: FCellGrid, counts: np.ndarray) -> list[tuple[float | str, float | str, float, float]]:
    """``(cell_re, cell_im, observed, expected)`` per cell, observed as a frequency."""
    observed = counts / counts.sum()
    return [
        (re, im, float(obs), float(exp))
        for (re, im), obs, exp in zip(grid.labels(), observed, grid.reference_masses())
    ]


@experiment(name="horocycle", stochastic=True)
def horocycle(t: list[float], N: int = 100_000, seed: int = 0) -> ExperimentTable:
    """F-cell histogram of N seeded horocycle points per t, with its TV distance."""
    grid = FCellGrid()
    chunk_size = get_settings().chunk_size
    rows: list[HorocycleCellRow] = []
    summary: dict[str, float] = {}
    for time in t:
        cloud = expanding_horocycle_sample(time, N, seed, chunk_size=chunk_size, map_fn=ordered_map)
        counts = grid.histogram(cloud.xs, cloud.ys)
        summary[f"tv.{time:g}"] = grid.tv_distance(counts)
        logger.info(f"t={time:g}: TV distance {summary[f'tv.{time:g}']:.4f}")
        rows.extend(
            HorocycleCellRow(t=time, cell_re=re, cell_im=im, observed=obs, expected=exp)
            for re, im, obs, exp in cell_rows(grid, counts)
        )
    return ExperimentTable.from_models(HorocycleCellRow, rows, summary=summary)
