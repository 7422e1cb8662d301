"""Heights along the diagonal flow and the cusp witness on translated orbits."""

import math

import numpy as np

from orbit_sdk import ExperimentTable, experiment
from orbitlab.exceptions import DomainError
from orbitlab.heights import cusp_height_witness, cusp_threshold, shortest_vector
from orbitlab.hyperbolic import diagonal, unipotent

from experiments.models import HeightRow


@experiment(name="heights", stochastic=True)
def heights(
    t_max: float = 20.0,
    steps: int = 41,
    witness_cases: int = 1000,
    bound: float = 2.0,
    seed: int = 0,
) -> ExperimentTable:
    """ht(Z²a(t)) against e^{t/2}, plus the witness bound on random u_{-ℓ/m} a(t) u_n."""
    if t_max < 0 or steps < 2:
        raise DomainError(f"Need t_max >= 0 and steps >= 2, got {t_max}, {steps}")
    rows = []
    for t in np.linspace(0.0, t_max, steps):
        report = shortest_vector(diagonal(float(t)))
        expected = math.exp(t / 2)
        rows.append(
            HeightRow(
                t=float(t),
                height=report.height,
                expected=expected,
                error=abs(report.height - expected) / expected,
                shortest_x=report.shortest_vector[0],
                shortest_y=report.shortest_vector[1],
            )
        )

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    threshold = cusp_threshold(bound)
    witnessed = certifiable = certified = 0
    for _ in range(witness_cases):
        m = int(rng.integers(1, 1000))
        ell = int(rng.integers(0, m))
        n = int(rng.integers(0, 100))
        t = float(rng.uniform(-8.0, 0.0))
        witness = cusp_height_witness(ell, m, t, n)
        g = unipotent(-ell / m) @ diagonal(t) @ unipotent(n)
        true_height = shortest_vector(g).height
        witnessed += witness.height <= true_height * (1 + 1e-9)
        if t <= threshold:
            certifiable += 1
            certified += true_height >= bound * (1 - 1e-9)
    return ExperimentTable.from_models(
        HeightRow,
        rows,
        summary={
            "max_error": max(row.error for row in rows),
            "witness_cases": witness_cases,
            "witness_below_height": witnessed,
            "cusp_threshold": threshold,
            "certifiable_cases": certifiable,
            "certified_above_bound": certified,
        },
    )
