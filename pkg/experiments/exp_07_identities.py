"""Residuals of the algebraic identities on randomized cases."""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from orbit_sdk import ExperimentTable, experiment
from orbitlab.hyperbolic import (
    HPoint,
    RealMat2,
    approx_horocycle_check,
    h_decomposition,
    h_matrix,
    horocycle_spacing_check,
    iwasawa_real,
    mobius,
    orthogonality_residual,
    reduce_to_F,
    residual,
    shear_conjugation_check,
    tau_commutation_check,
)

from experiments.models import IdentityRow

Rng = np.random.Generator


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    tolerance: float
    residual: Callable[[Rng], float]


def _shear(rng: Rng) -> float:
    return shear_conjugation_check(rng.uniform(-20, 20), rng.uniform(-20, 20))


def _spacing(rng: Rng) -> float:
    return horocycle_spacing_check(
        int(rng.integers(-1000, 1001)), int(rng.integers(1, 1_000_001)), rng.uniform(0, 20)
    )


def _h_reconstruction(rng: Rng) -> float:
    y = rng.uniform(0, 20)
    return residual(h_decomposition(y).reconstruct(), h_matrix(y))


def _orthogonality(rng: Rng) -> float:
    return orthogonality_residual(h_decomposition(rng.uniform(0, 20)).k)


def _tau(rng: Rng) -> float:
    return tau_commutation_check(rng.uniform(0, 20), rng.uniform(-20, 20))


def _random_special(rng: Rng) -> RealMat2:
    a, b, c = rng.uniform(-3, 3, size=3)
    a = a if abs(a) > 0.1 else 1.0
    return RealMat2(a, b, c, (1 + b * c) / a)


def _iwasawa(rng: Rng) -> float:
    g = _random_special(rng)
    return residual(iwasawa_real(g).reconstruct(), g)


def _group_action(rng: Rng) -> float:
    g, h = _random_special(rng), _random_special(rng)
    z = HPoint(rng.uniform(-2, 2), rng.uniform(0.1, 3))
    w1 = mobius(g @ h, z)
    w2 = mobius(g, mobius(h, z))
    return abs(w1.as_complex() - w2.as_complex()) / max(1.0, abs(w1.as_complex()))


def _round_trip(rng: Rng) -> float:
    z = HPoint(rng.uniform(-5, 5), 10 ** rng.uniform(-3, 3))
    reduced, word = reduce_to_F(z)
    back = word.apply_inverse(reduced)
    return abs(back.as_complex() - z.as_complex())


def _approx_horocycle(rng: Rng) -> float:
    """Deviation over its bound; at most 1 when the bound holds."""
    deviation, bound = approx_horocycle_check(
        int(rng.integers(2, 501)), rng.uniform(0.01, 1.0), int(rng.integers(1, 6))
    )
    return deviation / bound


CHECKS = (
    IdentityCheck("shear_conjugation", 1e-12, _shear),
    IdentityCheck("horocycle_spacing", 1e-12, _spacing),
    IdentityCheck("h_decomposition", 1e-10, _h_reconstruction),
    IdentityCheck("k_orthogonality", 1e-10, _orthogonality),
    IdentityCheck("tau_commutation", 1e-12, _tau),
    IdentityCheck("iwasawa_real", 1e-10, _iwasawa),
    IdentityCheck("mobius_action", 1e-10, _group_action),
    IdentityCheck("reduction_round_trip", 1e-9, _round_trip),
    IdentityCheck("approx_horocycle_ratio", 1.0, _approx_horocycle),
)


@experiment(name="identities", stochastic=True)
def identities(cases: int = 10_000, seed: int = 0) -> ExperimentTable:
    """Largest relative residual of every identity check over ``cases`` random inputs."""
    rows = []
    for index, check in enumerate(CHECKS):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))
        worst = max((check.residual(rng) for _ in range(cases)), default=0.0)
        if math.isnan(worst):
            worst = math.inf
        rows.append(
            IdentityRow(
                identity=check.name,
                cases=cases,
                max_residual=worst,
                tolerance=check.tolerance,
                holds=worst <= check.tolerance,
            )
        )
    return ExperimentTable.from_models(
        IdentityRow, rows, summary={"all_hold": all(row.holds for row in rows)}
    )
