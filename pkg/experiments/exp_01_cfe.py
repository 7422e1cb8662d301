"""Continued fraction word, Gauss orbit and convergents of one rational."""

from fractions import Fraction
from typing import Annotated

from orbit_sdk import ExperimentTable, experiment, positional
from orbitlab.cfe import cfe_len, cfe_of_rational, convergents, orbit
from orbitlab.exceptions import DomainError

from experiments.models import CfeRow


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"Cannot read {text!r} as a rational p/q: {e}") from e


@experiment(name="cfe")
def cfe(x: Annotated[str, positional("p/q")]) -> ExperimentTable:
    """Word, Gauss orbit and convergents of a rational in (0, 1)."""
    q = parse_rational(x)
    word = cfe_of_rational(q)
    rows = [
        CfeRow(index=i, quotient=a, orbit_point=str(point), convergent=str(conv))
        for i, (a, point, conv) in enumerate(
            zip(word.quotients, orbit(q), convergents(word)), start=1
        )
    ]
    return ExperimentTable.from_models(
        CfeRow,
        rows,
        summary={"word": str(word), "len": cfe_len(q), "value": str(word.value())},
    )
