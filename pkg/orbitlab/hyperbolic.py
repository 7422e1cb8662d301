"""SL2(R) acting on the upper half-plane, reduction to the modular fundamental domain,
geodesic coding, the shearing identities and horocycle equidistribution samplers.

Conventions:
    a(t) = diag(e^{-t/2}, e^{t/2}), u_x = [[1, x], [0, 1]], tau swaps coordinates.
    F = {|z| > 1, |Re z| < 1/2}; a point with Re z = 1/2 is moved to Re z = -1/2,
    and a point on |z| = 1 is kept only when Re z <= 0.

Identity residuals are relative: ``max|L - R| / max(1, max|L|, max|R|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from orbitlab.arith import coprime_residues, euler_phi, omega
from orbitlab.cfe import RationalLike, as_rational, cfe_of_rational
from orbitlab.exceptions import DomainError, GeodesicCodingError, ReductionError
from orbitlab.logger import logger

T_CAP = 40.0
MAX_MOVES = 10_000
DET_TOLERANCE = 1e-12
CHUNK_SIZE = 16_384
OVERFLOW_Y = 700.0
GEODESIC_OFFSET = 1e-9


# ============================================================================
# Matrices
# ============================================================================


@dataclass(frozen=True)
class RealMat2:
    a: float
    b: float
    c: float
    d: float

    def __matmul__(self, other: "RealMat2") -> "RealMat2":
        return RealMat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "RealMat2":
        det = self.det
        if det == 0:
            raise DomainError("Singular matrix has no inverse")
        return RealMat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def transpose(self) -> "RealMat2":
        return RealMat2(self.a, self.c, self.b, self.d)

    def is_special(self, tolerance: float = DET_TOLERANCE) -> bool:
        return abs(self.det - 1.0) <= tolerance

    def as_array(self) -> NDArray[np.float64]:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.float64)

    @classmethod
    def from_array(cls, array: ArrayLike) -> "RealMat2":
        (a, b), (c, d) = np.asarray(array, dtype=np.float64)
        return cls(float(a), float(b), float(c), float(d))


IDENTITY = RealMat2(1.0, 0.0, 0.0, 1.0)
TAU = RealMat2(0.0, 1.0, 1.0, 0.0)
S_MATRIX = RealMat2(0.0, -1.0, 1.0, 0.0)


def diagonal(t: float) -> RealMat2:
    """a(t) = diag(e^{-t/2}, e^{t/2})."""
    return RealMat2(math.exp(-t / 2), 0.0, 0.0, math.exp(t / 2))


def unipotent(x: float) -> RealMat2:
    """u_x = [[1, x], [0, 1]]."""
    return RealMat2(1.0, x, 0.0, 1.0)


def h_matrix(y: float) -> RealMat2:
    ch, sh = math.cosh(y / 2), math.sinh(y / 2)
    return RealMat2(ch, sh, sh, ch)


def k_matrix(y: float) -> RealMat2:
    """The rotation with h(y) = a(ln cosh y)·u_{sinh y}·k(y)."""
    scale = math.cosh(y) ** -0.5
    ch, sh = math.cosh(y / 2), math.sinh(y / 2)
    return RealMat2(scale * ch, -scale * sh, scale * sh, scale * ch)


def residual(lhs: RealMat2, rhs: RealMat2) -> float:
    left, right = lhs.as_array(), rhs.as_array()
    scale = max(1.0, float(np.max(np.abs(left))), float(np.max(np.abs(right))))
    return float(np.max(np.abs(left - right))) / scale


@dataclass(frozen=True)
class IwasawaReal:
    """``g = diag(alpha, beta)·u_x·k`` with ``k`` a rotation."""

    alpha: float
    beta: float
    x: float
    k: RealMat2

    def reconstruct(self) -> RealMat2:
        return RealMat2(self.alpha, 0.0, 0.0, self.beta) @ unipotent(self.x) @ self.k


def iwasawa_real(g: RealMat2) -> IwasawaReal:
    """Split off the rotation fixing the bottom row of ``g`` up to scale."""
    if abs(g.det) < DET_TOLERANCE:
        raise DomainError(f"Iwasawa decomposition needs a nonsingular matrix, det={g.det}")
    beta = math.hypot(g.c, g.d)
    k = RealMat2(g.d / beta, -g.c / beta, g.c / beta, g.d / beta)
    upper = g @ k.transpose()
    return IwasawaReal(alpha=upper.a, beta=beta, x=upper.b / upper.a, k=k)


# ============================================================================
# Points and the Möbius action
# ============================================================================


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not self.y > 0:
            raise DomainError(f"Points of the upper half-plane need y > 0, got {self.y}")

    def as_complex(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(z.real, z.imag)


def mobius(g: RealMat2, z: HPoint) -> HPoint:
    if g.det <= 0:
        raise DomainError(f"Möbius action on H needs det > 0, got {g.det}")
    w = z.as_complex()
    denominator = g.c * w + g.d
    if abs(denominator) <= DET_TOLERANCE * max(1.0, abs(g.c) * abs(w), abs(g.d)):
        raise DomainError(f"{z} is sent to the point at infinity")
    image = (g.a * w + g.b) / denominator
    if image.imag <= 0:
        raise DomainError(f"Image of {z} left the upper half-plane numerically")
    return HPoint.from_complex(image)


def geodesic_endpoints(g: RealMat2) -> tuple[float, float]:
    """Endpoints of ``t -> g·a(t)·i`` as ``t -> -inf`` and ``t -> +inf``.

    The past endpoint is ``a/c`` and the future endpoint ``b/d``; a zero
    denominator gives ``math.inf``.
    """
    if g.det == 0:
        raise DomainError("Geodesic endpoints need a nonsingular matrix")
    past = g.a / g.c if g.c != 0 else math.inf
    future = g.b / g.d if g.d != 0 else math.inf
    return past, future


# ============================================================================
# Reduction to the fundamental domain
# ============================================================================


class Letter(str, Enum):
    T = "T"
    """z -> z + 1"""
    T_INV = "T^-1"
    """z -> z - 1"""
    S = "S"
    """z -> -1/z"""


_LETTER_MATRICES: dict[Letter, tuple[int, int, int, int]] = {
    Letter.T: (1, 1, 0, 1),
    Letter.T_INV: (1, -1, 0, 1),
    Letter.S: (0, -1, 1, 0),
}

IntMat2 = tuple[int, int, int, int]


def _int_matmul(g: IntMat2, h: IntMat2) -> IntMat2:
    return (
        g[0] * h[0] + g[1] * h[2],
        g[0] * h[1] + g[1] * h[3],
        g[2] * h[0] + g[3] * h[2],
        g[2] * h[1] + g[3] * h[3],
    )


def _int_mobius(g: IntMat2, z: complex) -> complex:
    a, b, c, d = g
    return (a * z + b) / (c * z + d)


@dataclass(frozen=True)
class ReductionWord:
    """Letters in the order they are applied to the starting point."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self) -> None:
        for first, second in zip(self.letters, self.letters[1:]):
            if first == second == Letter.S:
                raise DomainError("A reduction word never applies S twice in a row")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        parts = []
        for letter, count in _runs(self.letters):
            if letter == Letter.S:
                parts.append("S")
            else:
                parts.append(f"T^{count if letter == Letter.T else -count}")
        return " ".join(parts)

    def matrix(self) -> IntMat2:
        """The integer matrix ``g`` with ``zF = g·z``."""
        g: IntMat2 = (1, 0, 0, 1)
        for letter in self.letters:
            g = _int_matmul(_LETTER_MATRICES[letter], g)
        return g

    def apply(self, z: HPoint) -> HPoint:
        return HPoint.from_complex(_int_mobius(self.matrix(), z.as_complex()))

    def apply_inverse(self, z: HPoint) -> HPoint:
        a, b, c, d = self.matrix()
        return HPoint.from_complex(_int_mobius((d, -b, -c, a), z.as_complex()))


def _runs(letters: Sequence[Letter]) -> Iterator[tuple[Letter, int]]:
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i] and letters[i] != Letter.S:
            j += 1
        yield letters[i], max(j - i, 1)
        i = max(j, i + 1)


def _reduction_letters(x: float, y: float, max_moves: int) -> tuple[float, float, list[Letter]]:
    letters: list[Letter] = []
    while True:
        shift = math.floor(x + 0.5)
        if shift:
            letters.extend([Letter.T_INV] * shift if shift > 0 else [Letter.T] * -shift)
            x -= shift
        r2 = x * x + y * y
        if r2 < 1.0 or (r2 == 1.0 and x > 0):
            x, y = -x / r2, y / r2
            letters.append(Letter.S)
        else:
            return x, y, letters
        if len(letters) > max_moves:
            raise ReductionError(
                f"Reduction of {x}+{y}i exceeded {max_moves} moves"
            )


def reduce_to_F(z: HPoint, max_moves: int = MAX_MOVES) -> tuple[HPoint, ReductionWord]:
    x, y, letters = _reduction_letters(z.x, z.y, max_moves)
    return HPoint(x, y), ReductionWord(tuple(letters))


def in_fundamental_domain(z: HPoint, tolerance: float = DET_TOLERANCE) -> bool:
    """Membership in the closure of F, up to ``tolerance``."""
    return abs(z.x) <= 0.5 + tolerance and z.x * z.x + z.y * z.y >= 1.0 - tolerance


def reduce_points(
    xs: ArrayLike, ys: ArrayLike, max_iterations: int = MAX_MOVES
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Vectorized reduction to F; same tie-breaking as :func:`reduce_to_F`, no words."""
    x = np.array(xs, dtype=np.float64)
    y = np.array(ys, dtype=np.float64)
    for _ in range(max_iterations):
        x -= np.floor(x + 0.5)
        r2 = x * x + y * y
        flip = (r2 < 1.0) | ((r2 == 1.0) & (x > 0))
        if not flip.any():
            return x, y
        x[flip] = -x[flip] / r2[flip]
        y[flip] = y[flip] / r2[flip]
    raise ReductionError(f"Vectorized reduction exceeded {max_iterations} inversions")


# ============================================================================
# Geodesic coding
# ============================================================================


@dataclass(frozen=True)
class GeodesicCode:
    letters: tuple[Letter, ...]

    @property
    def runs(self) -> list[tuple[str, int]]:
        """Run lengths of consecutive ``side`` (T, T^-1) and ``bottom`` (S) crossings."""
        runs: list[tuple[str, int]] = []
        for letter in self.letters:
            kind = "bottom" if letter == Letter.S else "side"
            if runs and runs[-1][0] == kind:
                runs[-1] = (kind, runs[-1][1] + 1)
            else:
                runs.append((kind, 1))
        return runs

    def side_runs_after_bottom(self) -> list[int]:
        """Lengths of the side runs entered right after a bottom crossing."""
        runs = self.runs
        return [
            length
            for (previous, _), (kind, length) in zip(runs, runs[1:])
            if previous == "bottom" and kind == "side"
        ]


def _endpoint_offset(q: Fraction, y_end: float) -> float:
    """Signed shift of the endpoint towards the side where ``cfe(q)`` is a prefix.

    ``q ± ε = [0; a1, ..., ak, N, ...]`` with ``N`` large, so the walk sees the
    canonical runs even for geodesics that run along edges of the tiling, as at
    ``1/2``. The size keeps the trailing run of ``N`` side crossings out of reach
    before ``y_end``.
    """
    sign = -1.0 if len(cfe_of_rational(q)) % 2 else 1.0
    return sign * min(GEODESIC_OFFSET, q.denominator**2 * y_end**2 / 8)


def geodesic_code(
    x: RationalLike, y_start: float, y_end: float, step: float = 1e-3
) -> GeodesicCode:
    """Walk the vertical geodesic ``x + iy`` downwards and record boundary crossings of F.

    ``step`` is the spacing of the samples in ``ln y``. A step that lets two
    side crossings, or two bottom crossings, happen between consecutive samples
    is rejected.
    """
    if not y_start > y_end > 0:
        raise DomainError(f"Need y_start > y_end > 0, got {y_start}, {y_end}")
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    q = as_rational(x)
    x0 = float(q) + _endpoint_offset(q, y_end)
    samples = max(1, math.ceil(math.log(y_start / y_end) / step))
    gamma: IntMat2 = (1, 0, 0, 1)
    letters: list[Letter] = []
    for j in range(samples + 1):
        y = y_start * math.exp(-j * step) if j < samples else y_end
        w = _int_mobius(gamma, complex(x0, y))
        _, _, new = _reduction_letters(w.real, w.imag, MAX_MOVES)
        sides = sum(1 for letter in new if letter != Letter.S)
        if j and (sides > 1 or new.count(Letter.S) > 1):
            raise GeodesicCodingError(
                f"Step {step} merges {len(new)} crossings near y={y:.3e}; use a finer step"
            )
        for letter in new:
            gamma = _int_matmul(_LETTER_MATRICES[letter], gamma)
        letters.extend(new)
    return GeodesicCode(tuple(letters))


# ============================================================================
# Algebraic identity checks
# ============================================================================


def shear_conjugation_check(x: float, t: float) -> float:
    """Residual of ``u_{-x} a(t) u_x = a(t) u_{x(1 - e^t)}``."""
    lhs = unipotent(-x) @ diagonal(t) @ unipotent(x)
    rhs = diagonal(t) @ unipotent(x * (1.0 - math.exp(t)))
    return residual(lhs, rhs)


def horocycle_spacing_check(n: int, m: int, t: float) -> float:
    """Residual of ``u_{(n+1)/m} a(t) = u_{n/m} a(t) u_{e^t/m}``."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if abs(t) > T_CAP:
        raise DomainError(f"|t| is capped at {T_CAP}, got {t}")
    lhs = unipotent((n + 1) / m) @ diagonal(t)
    rhs = unipotent(n / m) @ diagonal(t) @ unipotent(math.exp(t) / m)
    return residual(lhs, rhs)


@dataclass(frozen=True)
class HDecomposition:
    t: float
    s: float
    k: RealMat2

    def reconstruct(self) -> RealMat2:
        return diagonal(self.t) @ unipotent(self.s) @ self.k


def h_decomposition(y: float) -> HDecomposition:
    """``h(y) = a(ln cosh y)·u_{sinh y}·k(y)`` with ``k(y)`` a rotation."""
    if y < 0:
        raise DomainError(f"h_decomposition needs y >= 0, got {y}")
    if y > OVERFLOW_Y:
        raise DomainError(f"y={y} overflows cosh; the limit is {OVERFLOW_Y}")
    return HDecomposition(t=math.log(math.cosh(y)), s=math.sinh(y), k=k_matrix(y))


def orthogonality_residual(k: RealMat2) -> float:
    return max(residual(k.transpose() @ k, IDENTITY), abs(k.det - 1.0))


def tau_commutation_check(y: float, t: float) -> float:
    """Residual of ``tau h(y) = h(y) tau`` together with ``a(t) tau = tau a(-t)``."""
    return max(
        residual(TAU @ h_matrix(y), h_matrix(y) @ TAU),
        residual(diagonal(t) @ TAU, TAU @ diagonal(-t)),
    )


def approx_horocycle_check(m: int, h: float, frequency: int = 1) -> tuple[float, float]:
    """Deviation of the smeared coprime horocycle average from ``∫ f`` and its bound.

    ``f(s) = cos(2πks)`` on R/Z, so ``∫ f = 0`` and every inner integral has a
    closed form. Returns ``(deviation, 2^ω(m) / (φ(m) h))``.
    """
    if h <= 0:
        raise DomainError(f"h must be positive, got {h}")
    if frequency < 1:
        raise DomainError(f"frequency must be positive, got {frequency}")
    omega_k = 2.0 * math.pi * frequency
    ells = np.array(coprime_residues(m), dtype=np.float64) / m
    inner = (np.sin(omega_k * ells) - np.sin(omega_k * (ells - h))) / omega_k
    phi = euler_phi(m)
    deviation = abs(float(np.sum(inner))) / (phi * h)
    return deviation, 2 ** omega(m) / (phi * h)


# ============================================================================
# F-cell histograms
# ============================================================================


@dataclass(frozen=True)
class FCellGrid:
    """Re in [-1/2, 1/2] x Im in [0.8, 3] split into ``nx`` x ``ny`` cells, plus a cusp cell."""

    nx: int = 24
    ny: int = 40
    re_min: float = -0.5
    re_max: float = 0.5
    im_min: float = 0.8
    im_max: float = 3.0

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny + 1

    @property
    def cusp_index(self) -> int:
        return self.nx * self.ny

    def cell_index(self, xs: ArrayLike, ys: ArrayLike) -> NDArray[np.int64]:
        x = np.asarray(xs, dtype=np.float64)
        y = np.asarray(ys, dtype=np.float64)
        dx = (self.re_max - self.re_min) / self.nx
        dy = (self.im_max - self.im_min) / self.ny
        ix = np.clip(np.floor((x - self.re_min) / dx), 0, self.nx - 1).astype(np.int64)
        iy = np.clip(np.floor((y - self.im_min) / dy), 0, self.ny - 1).astype(np.int64)
        return np.where(y >= self.im_max, self.cusp_index, iy * self.nx + ix)

    def histogram(self, xs: ArrayLike, ys: ArrayLike) -> NDArray[np.int64]:
        return np.bincount(self.cell_index(xs, ys), minlength=self.n_cells)

    def labels(self) -> list[tuple[float | str, float | str]]:
        """``(cell_re, cell_im)`` centres per cell; the cusp cell is labelled ``"cusp"``."""
        dx = (self.re_max - self.re_min) / self.nx
        dy = (self.im_max - self.im_min) / self.ny
        cells: list[tuple[float | str, float | str]] = [
            (
                round(self.re_min + (ix + 0.5) * dx, 12),
                round(self.im_min + (iy + 0.5) * dy, 12),
            )
            for iy in range(self.ny)
            for ix in range(self.nx)
        ]
        cells.append(("cusp", "cusp"))
        return cells

    def reference_masses(self) -> NDArray[np.float64]:
        """Normalized hyperbolic area ``dx dy / y^2 / (π/3)`` of each cell inside F."""
        return _reference_masses(self)

    def tv_distance(self, counts: ArrayLike) -> float:
        counts = np.asarray(counts, dtype=np.float64)
        total = counts.sum()
        if total == 0:
            raise DomainError("Total-variation distance of an empty histogram")
        return 0.5 * float(np.sum(np.abs(counts / total - self.reference_masses())))


def _cell_mass(x0: float, x1: float, y0: float, y1: float) -> float:
    def integrand(x: float) -> float:
        lower = max(y0, math.sqrt(max(0.0, 1.0 - x * x)))
        return max(0.0, 1.0 / lower - 1.0 / y1)

    breaks = sorted(
        s * math.sqrt(1.0 - y * y)
        for y in (y0, y1)
        if y < 1.0
        for s in (-1.0, 1.0)
        if x0 < s * math.sqrt(1.0 - y * y) < x1
    )
    value, _ = integrate.quad(integrand, x0, x1, points=breaks or None)
    return value


@lru_cache(maxsize=8)
def _reference_masses(grid: FCellGrid) -> NDArray[np.float64]:
    dx = (grid.re_max - grid.re_min) / grid.nx
    dy = (grid.im_max - grid.im_min) / grid.ny
    masses = np.empty(grid.n_cells, dtype=np.float64)
    for iy in range(grid.ny):
        for ix in range(grid.nx):
            masses[iy * grid.nx + ix] = _cell_mass(
                grid.re_min + ix * dx,
                grid.re_min + (ix + 1) * dx,
                grid.im_min + iy * dy,
                grid.im_min + (iy + 1) * dy,
            )
    masses[grid.cusp_index] = (grid.re_max - grid.re_min) / grid.im_max
    masses /= math.pi / 3.0
    masses.flags.writeable = False
    return masses


# ============================================================================
# Seeded samplers
# ============================================================================


@dataclass
class PointCloud:
    xs: NDArray[np.float64]
    ys: NDArray[np.float64]
    times: NDArray[np.float64] | None = None

    def __len__(self) -> int:
        return len(self.xs)

    def points(self) -> Iterator[HPoint]:
        for x, y in zip(self.xs, self.ys):
            yield HPoint(float(x), float(y))

    @classmethod
    def concatenate(cls, clouds: Iterable["PointCloud"]) -> "PointCloud":
        clouds = list(clouds)
        times = (
            np.concatenate([c.times for c in clouds])
            if clouds and all(c.times is not None for c in clouds)
            else None
        )
        return cls(
            xs=np.concatenate([c.xs for c in clouds]),
            ys=np.concatenate([c.ys for c in clouds]),
            times=times,
        )


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for chunk ``index``; independent of how chunks are scheduled."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def chunk_sizes(total: int, chunk_size: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(total, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


MapFn = Callable[..., Iterable[PointCloud]]


@dataclass(frozen=True)
class HorocycleChunk:
    t: float
    size: int
    seed: int
    index: int

    def __call__(self) -> PointCloud:
        rng = chunk_rng(self.seed, self.index)
        xs = rng.random(self.size)
        ys = np.full(self.size, math.exp(-self.t))
        return PointCloud(*reduce_points(xs, ys))


def expanding_horocycle_sample(
    t: float,
    N: int,
    seed: int,
    chunk_size: int = CHUNK_SIZE,
    map_fn: MapFn = map,
) -> PointCloud:
    """``N`` points ``u_x a(t)·i = x + i e^{-t}``, x uniform on [0, 1), reduced to F."""
    if t < 0 or t > T_CAP:
        raise DomainError(f"t must lie in [0, {T_CAP}], got {t}")
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    chunks = [
        HorocycleChunk(t=t, size=size, seed=seed, index=i)
        for i, size in enumerate(chunk_sizes(N, chunk_size))
    ]
    return PointCloud.concatenate(map_fn(_run_chunk, chunks))


def orbit_time_span(n: int, m: int) -> float:
    """T = ln(max(1, n)·m)."""
    if m < 1 or n < 0:
        raise DomainError(f"Need n >= 0 and m >= 1, got n={n}, m={m}")
    return math.log(max(1, n) * m)


@dataclass(frozen=True)
class TranslatedOrbitChunk:
    n: int
    m: int
    span: float
    size: int
    seed: int
    index: int

    def __call__(self) -> PointCloud:
        rng = chunk_rng(self.seed, self.index)
        ells = np.array(coprime_residues(self.m), dtype=np.float64)
        ell = ells[rng.integers(len(ells), size=self.size)]
        t = rng.uniform(0.0, self.span, size=self.size)
        y = np.exp(-t)
        x, y = reduce_points(ell / self.m + self.n * y, y)
        return PointCloud(x, y, t)


def translated_orbit_sample(
    n: int,
    m: int,
    samples_per_unit_time: int,
    seed: int,
    chunk_size: int = CHUNK_SIZE,
    map_fn: MapFn = map,
) -> PointCloud:
    """Samples of ``u_{ℓ/m} a(t) u_n·i`` with ℓ uniform in Λ_m and t uniform in [0, T]."""
    span = orbit_time_span(n, m)
    if span > T_CAP:
        raise DomainError(f"T = {span:.3f} exceeds the cap {T_CAP}")
    if samples_per_unit_time < 1:
        raise DomainError("samples_per_unit_time must be positive")
    total = max(1, math.ceil(samples_per_unit_time * span))
    chunks = [
        TranslatedOrbitChunk(n=n, m=m, span=span, size=size, seed=seed, index=i)
        for i, size in enumerate(chunk_sizes(total, chunk_size))
    ]
    logger.debug(f"Sampling {total} points of the translated orbit n={n}, m={m}")
    return PointCloud.concatenate(map_fn(_run_chunk, chunks))


def _run_chunk(chunk: Callable[[], PointCloud]) -> PointCloud:
    return chunk()


# ============================================================================
# Observables and windowed shear averages
# ============================================================================


@dataclass(frozen=True)
class Observable:
    name: str
    func: Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]
    """Evaluated on points already reduced to F."""
    sup_norm: float

    def __call__(self, xs: ArrayLike, ys: ArrayLike) -> NDArray[np.float64]:
        x, y = reduce_points(xs, ys)
        return self.func(x, y)


def _one(x: NDArray[np.float64], y: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.ones_like(x)


def _bump(x: NDArray[np.float64], y: NDArray[np.float64]) -> NDArray[np.float64]:
    centre, radius = 1.5, 0.3
    d = np.arccosh(1.0 + (x * x + (y - centre) ** 2) / (2.0 * y * centre))
    inside = d < radius
    out = np.zeros_like(x)
    r = d[inside] / radius
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r * r))
    return out


def _cusp(x: NDArray[np.float64], y: NDArray[np.float64]) -> NDArray[np.float64]:
    s = np.clip((y - 1.5) / 1.5, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


OBSERVABLES: dict[str, Observable] = {
    "one": Observable("one", _one, 1.0),
    "bump": Observable("bump", _bump, 1.0),
    "cusp": Observable("cusp", _cusp, 1.0),
}


def get_observable(name: str) -> Observable:
    try:
        return OBSERVABLES[name]
    except KeyError:
        raise DomainError(
            f"Unknown test function '{name}'; choose from {', '.join(OBSERVABLES)}"
        ) from None


@dataclass(frozen=True)
class WindowedAverage:
    value: float
    """Average of f over the sheared window [x, x + Δ]."""
    horocycle_value: float
    """Average of f over the closed horocycle at height e^{-x}."""
    budget: float

    @property
    def deviation(self) -> float:
        return abs(self.value - self.horocycle_value)

    @property
    def within_budget(self) -> bool:
        return self.deviation <= self.budget


def _window_nodes(start: float, width: float, nodes: int) -> NDArray[np.float64]:
    return start + (np.arange(nodes) + 0.5) * (width / nodes)


def _orbit_values(n: int, m: int, times: NDArray[np.float64], f: Observable) -> NDArray[np.float64]:
    """Mean of f over ℓ ∈ Λ_m at each time."""
    ells = np.array(coprime_residues(m), dtype=np.float64) / m
    decay = np.exp(-times)[:, None]
    xs = ells[None, :] + n * decay
    ys = np.broadcast_to(decay, xs.shape)
    return f(xs.ravel(), ys.ravel()).reshape(xs.shape).mean(axis=1)


def horocycle_average(height: float, f: Observable) -> float:
    """``∫_0^1 f(s + i·height) ds`` by the midpoint rule."""
    nodes = max(4096, 64 * math.ceil(1.0 / height))
    s = (np.arange(nodes) + 0.5) / nodes
    return float(np.mean(f(s, np.full(nodes, height))))


def windowed_shear_average(
    n: int,
    m: int,
    x: float,
    delta: float,
    f: str | Observable,
    eps: float = 0.1,
    nodes: int = 64,
) -> WindowedAverage:
    f = get_observable(f) if isinstance(f, str) else f
    span = orbit_time_span(n, m)
    if not 0 < eps < 0.5:
        raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
    if not 0 <= x <= (1 - 2 * eps) * span:
        raise DomainError(f"x={x} outside [0, (1 - 2·eps)·T] with T={span:.4f}")
    if delta <= 0:
        raise DomainError(f"Delta must be positive, got {delta}")
    value = float(np.mean(_orbit_values(n, m, _window_nodes(x, delta, nodes), f)))
    norm = f.sup_norm
    budget = eps + 4 * norm * eps + norm / ((max(1, n) * m) ** eps * delta)
    return WindowedAverage(
        value=value,
        horocycle_value=horocycle_average(math.exp(-x), f),
        budget=budget,
    )


def orbit_time_average(
    n: int, m: int, f: str | Observable, delta: float, nodes: int = 64
) -> tuple[float, list[float]]:
    """Full-span average of f and its per-window averages for windows of width about ``delta``.

    The span T is cut into ``ceil(T / delta)`` equal windows with the same
    number of midpoint nodes each, so the full average is the mean of the
    window averages.
    """
    f = get_observable(f) if isinstance(f, str) else f
    span = orbit_time_span(n, m)
    if delta <= 0:
        raise DomainError(f"Delta must be positive, got {delta}")
    windows = max(1, math.ceil(span / delta))
    width = span / windows
    per_window = [
        float(np.mean(_orbit_values(n, m, _window_nodes(k * width, width, nodes), f)))
        for k in range(windows)
    ]
    all_nodes = np.concatenate(
        [_window_nodes(k * width, width, nodes) for k in range(windows)]
    )
    return float(np.mean(_orbit_values(n, m, all_nodes, f))), per_window
