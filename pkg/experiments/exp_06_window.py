"""Windowed shear averages along a translated orbit, each with its error budget."""

from typing import Annotated

import numpy as np

from orbit_sdk import ExperimentTable, experiment, modulus
from orbit_sdk.config import get_settings
from orbitlab.hyperbolic import orbit_time_average, orbit_time_span, windowed_shear_average

from experiments.models import ObservableName, WindowRow


@experiment(name="window")
def window(
    n: int,
    m: Annotated[int, modulus()],
    f: ObservableName = ObservableName.BUMP,
    delta: float = 0.05,
    windows: int = 16,
    nodes: int = 64,
) -> ExperimentTable:
    """Compare windows [x, x + Δ] with the closed horocycle at height e^{-x}.

    The window starts x are spread evenly over [0, (1 - 2ε)·T].
    """
    eps = get_settings().shear_epsilon
    span = orbit_time_span(n, m)
    rows = []
    for x in np.linspace(0.0, (1 - 2 * eps) * span, windows):
        result = windowed_shear_average(n, m, float(x), delta, f.value, eps=eps, nodes=nodes)
        rows.append(
            WindowRow(
                x=float(x),
                value=result.value,
                horocycle_value=result.horocycle_value,
                deviation=result.deviation,
                budget=result.budget,
                within_budget=result.within_budget,
            )
        )
    full, per_window = orbit_time_average(n, m, f.value, delta, nodes=nodes)
    return ExperimentTable.from_models(
        WindowRow,
        rows,
        summary={
            "span": span,
            "full_average": full,
            "window_mean": float(np.mean(per_window)),
            "all_within_budget": all(row.within_budget for row in rows),
        },
    )
