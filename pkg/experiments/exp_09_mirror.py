"""The τ-mirror involution n ↦ n′ on Λ_m and the sign of n·n′ mod m."""

from typing import Annotated

from orbit_sdk import ExperimentTable, experiment, modulus
from orbit_sdk.checkpoint import sweep
from orbitlab.exceptions import DomainError, InvariantViolation
from orbitlab.lattice2 import cusp_return_check, mirror_residue, mirror_table, time_reflection_check

from experiments.models import MirrorRow


def mirror_rows(m: int) -> ExperimentTable:
    if m < 2:
        raise DomainError(f"The mirror table needs m >= 2, got {m}")
    rows = [
        MirrorRow(
            m=m,
            n=n,
            n_prime=n_prime,
            product_mod_m=n * n_prime % m,
            time_reflection=time_reflection_check(n, m),
        )
        for n, n_prime in sorted(mirror_table(m).items())
    ]
    return ExperimentTable.from_models(
        MirrorRow,
        rows,
        summary={
            f"residue.{m}": mirror_residue(m),
            f"cusp_return.{m}": cusp_return_check(m),
        },
    )


def mirror_sign(residues: dict[int, int]) -> int:
    """+1 when n·n′ ≡ 1 for every m > 2, -1 when n·n′ ≡ -1; m = 2 cannot tell them apart."""
    signs = {1 if r == 1 else -1 if r == m - 1 else 0 for m, r in residues.items() if m > 2}
    if not signs:
        return 1
    if len(signs) != 1 or 0 in signs:
        raise InvariantViolation(f"n·n′ mod m is not ±1 consistently: {residues}")
    return signs.pop()


@experiment(name="mirror", sweep=True)
def mirror(m: Annotated[list[int], modulus()]) -> ExperimentTable:
    """Mirror table n ↦ n′ for every m, with the common sign of n·n′ mod m."""
    table = ExperimentTable.concat(sweep(m, mirror_rows))
    residues = {key: int(table.summary[f"residue.{key}"]) for key in dict.fromkeys(m)}
    table.summary["sign"] = mirror_sign(residues)
    table.summary["all_time_reflections"] = all(row[-1] for row in table.rows)
    return table
