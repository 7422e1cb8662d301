"""Partial-quotient statistics of all n/m against the Gauss–Kuzmin law."""

from functools import partial
from typing import Annotated

from orbit_sdk import ExperimentTable, experiment, modulus
from orbit_sdk.checkpoint import sweep
from orbit_sdk.config import get_settings
from orbitlab.exceptions import DomainError
from orbitlab.measures import DigitHistogram, digit_histogram, gauss_kuzmin_frequency, gauss_kuzmin_tail

from experiments.models import DigitCountRow, DigitRow

TAIL = "tail"


def digit_counts(m: int, kmax: int) -> ExperimentTable:
    histogram = digit_histogram(m, kmax)
    rows = [DigitCountRow(digit=str(k), count=histogram.counts[k]) for k in range(1, kmax + 1)]
    rows.append(DigitCountRow(digit=TAIL, count=histogram.tail))
    return ExperimentTable.from_models(DigitCountRow, rows)


def merge_counts(parts: list[ExperimentTable], kmax: int) -> DigitHistogram:
    histogram = DigitHistogram(kmax=kmax)
    for part in parts:
        for digit, count in part.rows:
            if digit == TAIL:
                histogram.tail += int(count)
            else:
                histogram.counts[int(digit)] += int(count)
    return histogram


@experiment(name="kuzmin", sweep=True)
def kuzmin(m_min: int = 2, m_max: Annotated[int, modulus()] = 1000) -> ExperimentTable:
    """Digit histogram over every n/m with m_min <= m <= m_max."""
    if not 2 <= m_min <= m_max:
        raise DomainError(f"Need 2 <= m_min <= m_max, got {m_min}, {m_max}")
    kmax = get_settings().kuzmin_kmax
    histogram = merge_counts(sweep(range(m_min, m_max + 1), partial(digit_counts, kmax=kmax)), kmax)
    rows = [
        DigitRow(
            digit=str(k),
            count=histogram.counts[k],
            frequency=histogram.frequency(k),
            reference=gauss_kuzmin_frequency(k),
        )
        for k in range(1, kmax + 1)
    ]
    rows.append(
        DigitRow(
            digit=TAIL,
            count=histogram.tail,
            frequency=histogram.frequency(kmax + 1),
            reference=gauss_kuzmin_tail(kmax),
        )
    )
    return ExperimentTable.from_models(DigitRow, rows, summary={"total": histogram.total})
