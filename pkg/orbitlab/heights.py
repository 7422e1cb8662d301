"""Shortest vectors in the sup-norm, the height function and its S-adic version.

``ht(Z²·g) = 1 / min_{v ≠ 0} ‖v·g‖_∞``; large height means deep in the cusp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.typing import ArrayLike, NDArray

from orbitlab.exceptions import DomainError, ReductionError
from orbitlab.hyperbolic import RealMat2, diagonal, unipotent
from orbitlab.padic import FinitePlaceData, PadicMat2, from_rational, is_GL2_Zp

DET_TOLERANCE = 1e-12
ENUMERATION_RADIUS = 100
MAX_LAGRANGE_STEPS = 10_000


@dataclass(frozen=True)
class HeightReport:
    shortest_vector: tuple[int, int]
    attained_norm: float
    height: float
    witness_only: bool = False
    """True when ``shortest_vector`` is only a witness, so ``height`` is a lower bound."""

    def certifies(self, bound: float) -> bool:
        return self.height >= bound


def _as_basis(basis: RealMat2 | ArrayLike) -> NDArray[np.float64]:
    if isinstance(basis, RealMat2):
        return basis.as_array()
    array = np.array(basis, dtype=np.float64)
    if array.shape != (2, 2):
        raise DomainError(f"Expected a 2x2 basis, got shape {array.shape}")
    return array


def lagrange_reduce(basis: RealMat2 | ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    """Lagrange–Gauss reduction; returns ``(reduced, U)`` with ``reduced = U @ basis``."""
    b = _as_basis(basis).copy()
    if abs(np.linalg.det(b)) < DET_TOLERANCE:
        raise DomainError(f"Basis is (nearly) singular: det={np.linalg.det(b):.3e}")
    u = np.eye(2, dtype=np.int64)
    if b[0] @ b[0] > b[1] @ b[1]:
        b, u = b[::-1].copy(), u[::-1].copy()
    for _ in range(MAX_LAGRANGE_STEPS):
        mu = round(float(b[0] @ b[1]) / float(b[0] @ b[0]))
        b[1] -= mu * b[0]
        u[1] -= mu * u[0]
        if b[1] @ b[1] >= b[0] @ b[0]:
            return b, u
        b, u = b[::-1].copy(), u[::-1].copy()
    raise ReductionError(f"Lagrange reduction did not settle in {MAX_LAGRANGE_STEPS} steps")


def _normalize_sign(v: NDArray[np.int64]) -> tuple[int, int]:
    x, y = int(v[0]), int(v[1])
    if x < 0 or (x == 0 and y < 0):
        x, y = -x, -y
    return x, y


def shortest_vector(basis: RealMat2 | ArrayLike) -> HeightReport:
    """Minimize ``‖v·basis‖_∞`` over ``v ∈ Z² \\ {0}``.

    The search runs over coefficients on the Lagrange-reduced basis inside a
    box that provably contains every vector no longer than the shorter
    reduced row.
    """
    reduced, u = lagrange_reduce(basis)
    best = float(np.min(np.max(np.abs(reduced), axis=1)))
    columns = np.linalg.norm(np.linalg.inv(reduced), axis=0)
    radii = np.floor(math.sqrt(2.0) * best * columns * (1 + 1e-12)).astype(np.int64)
    if np.any(radii > ENUMERATION_RADIUS):
        raise DomainError(
            f"Coverage box {radii.tolist()} exceeds the enumeration radius {ENUMERATION_RADIUS}"
        )
    xs, ys = np.meshgrid(
        np.arange(-radii[0], radii[0] + 1), np.arange(-radii[1], radii[1] + 1), indexing="ij"
    )
    coeffs = np.stack([xs.ravel(), ys.ravel()], axis=1)
    coeffs = coeffs[np.any(coeffs != 0, axis=1)]
    images = coeffs @ reduced
    norms = np.max(np.abs(images), axis=1)
    # Ties in the sup-norm go to the shorter Euclidean vector.
    i = int(np.lexsort((np.linalg.norm(images, axis=1), norms))[0])
    vector = _normalize_sign(coeffs[i] @ u)
    return HeightReport(
        shortest_vector=vector,
        attained_norm=float(norms[i]),
        height=1.0 / float(norms[i]),
    )


def ht_inf(g: RealMat2 | ArrayLike) -> float:
    return shortest_vector(g).height


def _require_integral(h: FinitePlaceData) -> None:
    for p, g in h.finite.items():
        if not is_GL2_Zp(g):
            raise DomainError(
                f"Component at {p} is not in GL2(Z_{p}); not a representative of the S-adic space"
            )


def ht_S(h: FinitePlaceData) -> float:
    """Height of an S-adic lattice whose finite components are integral and invertible."""
    _require_integral(h)
    real = h.real if h.real is not None else RealMat2(1.0, 0.0, 0.0, 1.0)
    return ht_inf(real)


def _sup_padic_norm(v: tuple[int, int], g: PadicMat2) -> Fraction:
    x = from_rational(v[0], g.base, g.precision)
    y = from_rational(v[1], g.base, g.precision)
    return max((x * g.a + y * g.c).norm(), (x * g.b + y * g.d).norm())


def product_norm(v: tuple[int, int], h: FinitePlaceData) -> float:
    """``‖v·h_∞‖_∞ · ∏_p ‖v·h_p‖_p``."""
    real = h.real.as_array() if h.real is not None else np.eye(2)
    total = float(np.max(np.abs(np.asarray(v, dtype=np.float64) @ real)))
    for g in h.finite.values():
        total *= float(_sup_padic_norm(v, g))
    return total


def ht_S_brute_force(h: FinitePlaceData, radius: int = 50) -> HeightReport:
    """Minimum of the product norm over primitive integer vectors with ``|v_i| <= radius``."""
    best: tuple[float, tuple[int, int]] | None = None
    for x in range(0, radius + 1):
        for y in range(-radius, radius + 1):
            if (x == 0 and y <= 0) or math.gcd(x, y) != 1:
                continue
            norm = product_norm((x, y), h)
            if best is None or norm < best[0]:
                best = (norm, (x, y))
    if best is None:
        raise DomainError(f"No primitive vectors within radius {radius}")
    return HeightReport(shortest_vector=best[1], attained_norm=best[0], height=1.0 / best[0])


def cusp_height_witness(ell: int, m: int, t: float, n: int) -> HeightReport:
    """Lower bound ``e^{-t/2}`` on ``ht(Z²·u_{-ℓ/m} a(t) u_n)`` from the vector ``e2``."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    g = unipotent(-ell / m) @ diagonal(t) @ unipotent(n)
    image = np.array([0.0, 1.0]) @ g.as_array()
    norm = float(np.max(np.abs(image)))
    return HeightReport(
        shortest_vector=(0, 1), attained_norm=norm, height=1.0 / norm, witness_only=True
    )


def cusp_threshold(bound: float) -> float:
    """The time ``-2 ln C`` below which the witness certifies height at least ``C``."""
    if bound <= 0:
        raise DomainError(f"Height bounds are positive, got {bound}")
    return -2.0 * math.log(bound)
