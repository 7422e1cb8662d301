"""Exact check of the coprime counting bound on random rational intervals."""

from fractions import Fraction
from functools import partial
from typing import Annotated

import numpy as np

from orbit_sdk import ExperimentTable, experiment, modulus
from orbit_sdk.checkpoint import sweep
from orbitlab.arith import (
    IntInterval,
    brute_force_coprime_count,
    coprime_bound_holds,
)
from orbitlab.exceptions import InvariantViolation

from experiments.models import CoprimeRow

MAX_DENOMINATOR = 64


def random_intervals(m: int, count: int, seed: int) -> list[IntInterval]:
    """``[0, m)`` followed by ``count`` intervals with endpoints in ``[-2m, 2m]``.

    Each m draws from its own stream keyed by ``(seed, m)``.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, m])))
    intervals = [IntInterval(Fraction(0), Fraction(m))]
    for _ in range(count):
        q = int(rng.integers(1, MAX_DENOMINATOR + 1))
        lo = Fraction(int(rng.integers(-2 * m * q, 2 * m * q + 1)), q)
        length = Fraction(int(rng.integers(0, 2 * m * q + 1)), q)
        intervals.append(IntInterval(lo, lo + length))
    return intervals


def coprime_table(m: int, intervals: int, seed: int, verify: bool) -> ExperimentTable:
    rows = []
    for interval in random_intervals(m, intervals, seed):
        result = coprime_bound_holds(m, interval)
        if verify:
            brute = brute_force_coprime_count(m, interval)
            if brute != result.count:
                raise InvariantViolation(
                    f"Inclusion-exclusion gives {result.count} on [{interval.lo}, {interval.hi}) "
                    f"for m={m}, scanning gives {brute}"
                )
        if not result.holds:
            raise InvariantViolation(
                f"Coprime bound fails for m={m} on [{interval.lo}, {interval.hi}): "
                f"slack {result.slack} > {result.bound}"
            )
        rows.append(
            CoprimeRow(
                m=m,
                lo=str(interval.lo),
                hi=str(interval.hi),
                count=result.count,
                expected=str(result.expected),
                slack=str(result.slack),
                bound=result.bound,
                holds=result.holds,
            )
        )
    worst = max(Fraction(r.slack) / r.bound for r in rows)
    return ExperimentTable.from_models(
        CoprimeRow, rows, summary={f"max_slack_ratio.{m}": float(worst)}
    )


@experiment(name="coprime", sweep=True, stochastic=True)
def coprime(
    m: Annotated[list[int], modulus()],
    intervals: int = 200,
    seed: int = 0,
    verify: bool = False,
) -> ExperimentTable:
    """Counts, expected counts and slack against 2^ω(m) over random intervals."""
    compute = partial(coprime_table, intervals=intervals, seed=seed, verify=verify)
    table = ExperimentTable.concat(sweep(m, compute))
    table.summary["cases"] = len(table.rows)
    table.summary["all_hold"] = all(row[-1] for row in table.rows)
    return table
