"""Boundary crossings of the vertical geodesic towards a rational, compared with its CFE."""

from typing import Annotated

from orbit_sdk import ExperimentTable, experiment, positional
from orbitlab.cfe import cfe_of_rational
from orbitlab.hyperbolic import geodesic_code

from experiments.exp_01_cfe import parse_rational
from experiments.models import RunRow


@experiment(name="geodesic")
def geodesic(
    x: Annotated[str, positional("p/q")],
    y_start: float = 2.0,
    y_end: float = 1e-3,
    step: float = 1e-3,
) -> ExperimentTable:
    """Run lengths of side and bottom crossings on the way down from x + i·y_start."""
    q = parse_rational(x)
    code = geodesic_code(q, y_start, y_end, step)
    rows = [
        RunRow(index=i, kind=kind, length=length)
        for i, (kind, length) in enumerate(code.runs, start=1)
    ]
    side_runs = code.side_runs_after_bottom()
    quotients = list(cfe_of_rational(q).quotients)
    return ExperimentTable.from_models(
        RunRow,
        rows,
        summary={
            "word": str(cfe_of_rational(q)),
            "side_runs": " ".join(str(r) for r in side_runs),
            "matches_cfe": side_runs == quotients,
        },
    )
