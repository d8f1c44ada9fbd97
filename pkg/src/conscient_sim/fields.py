"""Importance fields: Gaussian-prior samples on a square grid.

A field assigns a real importance value to every cell of an r x r grid. Fields
are drawn from a zero-mean multivariate normal whose covariance is a squared
exponential over cell coordinates, then reshaped over an agent's life by local
Gaussian bumps (visit penalties, rewards, social feedback) and by additive
white noise on waking. Every operation here is a pure function of its inputs
and the supplied random stream: callers get a new field back, inputs are never
mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, CovarianceDegeneracyError

# Exact sampling factorizes an r^2 x r^2 covariance; memory grows as r^4.
MAX_RESOLUTION = 128
JITTER_CEILING = 1e-4


@dataclass(frozen=True)
class KernelConfig:
    """Squared-exponential kernel amplitude * exp(-|p-q|^2 / (2 lengthscale^2)).

    `jitter` is added to the diagonal for numerical stability; distances are
    Euclidean in cell units.
    """

    amplitude: float = 1.0
    lengthscale: float = 2.0
    jitter: float = 1e-8

    def __post_init__(self) -> None:
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise ConfigError(f"kernel.amplitude must be > 0, got {self.amplitude}")
        if not (math.isfinite(self.lengthscale) and self.lengthscale > 0):
            raise ConfigError(f"kernel.lengthscale must be > 0, got {self.lengthscale}")
        if not (math.isfinite(self.jitter) and self.jitter >= 0):
            raise ConfigError(f"kernel.jitter must be >= 0, got {self.jitter}")


@dataclass(frozen=True, order=True)
class GridCell:
    i: int
    j: int


@dataclass(eq=False)
class ValueField:
    """Importance values on an r x r grid, row-major, always finite."""

    resolution: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.resolution < 2:
            raise ConfigError(f"field resolution must be >= 2, got {self.resolution}")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.resolution, self.resolution):
            raise ConfigError(
                f"field values shape {self.values.shape} does not match "
                f"resolution {self.resolution}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("field values must be finite")

    def in_bounds(self, cell: GridCell) -> bool:
        return 0 <= cell.i < self.resolution and 0 <= cell.j < self.resolution

    def value_at(self, cell: GridCell) -> float:
        if not self.in_bounds(cell):
            raise ConfigError(f"cell {cell} outside {self.resolution}x{self.resolution} grid")
        return float(self.values[cell.i, cell.j])

    def copy(self) -> "ValueField":
        return ValueField(self.resolution, self.values.copy())


def kernel_matrix(kernel: KernelConfig, resolution: int) -> np.ndarray:
    """Covariance over the r^2 grid cells in row-major order, jitter included."""
    idx = np.arange(resolution, dtype=float)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    pts = np.column_stack([ii.ravel(), jj.ravel()])
    diff = pts[:, None, :] - pts[None, :, :]
    sq = np.sum(diff * diff, axis=-1)
    cov = kernel.amplitude * np.exp(-sq / (2.0 * kernel.lengthscale**2))
    cov[np.diag_indices_from(cov)] += kernel.jitter
    return cov


def sample_field(kernel: KernelConfig, resolution: int, rng: np.random.Generator) -> ValueField:
    """Draw one field from the zero-mean prior with the given kernel.

    The covariance is factorized by Cholesky; on failure the diagonal jitter
    escalates tenfold per retry up to JITTER_CEILING before giving up. The
    same kernel, resolution, and seed always reproduce the same field.
    """
    if resolution < 2:
        raise ConfigError(f"sampling needs resolution >= 2, got {resolution}")
    if resolution > MAX_RESOLUTION:
        raise ConfigError(
            f"exact sampling is bounded at resolution {MAX_RESOLUTION}, got {resolution}"
        )
    n = resolution * resolution
    base = kernel_matrix(KernelConfig(kernel.amplitude, kernel.lengthscale, 0.0), resolution)
    jitter = kernel.jitter
    while True:
        try:
            chol = np.linalg.cholesky(base + jitter * np.eye(n))
            break
        except np.linalg.LinAlgError:
            jitter = max(jitter, 1e-12) * 10.0
            if jitter > JITTER_CEILING:
                raise CovarianceDegeneracyError(
                    f"covariance not positive definite up to jitter {JITTER_CEILING}"
                ) from None
    draw = chol @ rng.standard_normal(n)
    return ValueField(resolution, draw.reshape(resolution, resolution))


def bump_amount(peak: float, width: float, distance: float) -> float:
    """Gaussian radial profile local_bump applies at a given cell distance."""
    if not (math.isfinite(width) and width > 0):
        raise ConfigError(f"bump width must be > 0, got {width}")
    if not math.isfinite(peak):
        raise ConfigError(f"bump peak must be finite, got {peak}")
    return peak * math.exp(-(distance * distance) / (2.0 * width * width))


def local_bump(field: ValueField, center: GridCell, peak: float, width: float) -> ValueField:
    """Add an unnormalized Gaussian bump centered on a cell.

    Every cell gains peak * exp(-d^2 / (2 width^2)) where d is the Euclidean
    distance to `center` in cell units; negative peaks penalize, positive
    peaks reward. Exactly inverted by a second bump with -peak.
    """
    if not field.in_bounds(center):
        raise ConfigError(f"bump center {center} outside grid")
    if not (math.isfinite(width) and width > 0):
        raise ConfigError(f"bump width must be > 0, got {width}")
    if not math.isfinite(peak):
        raise ConfigError(f"bump peak must be finite, got {peak}")
    idx = np.arange(field.resolution, dtype=float)
    d2 = (idx[:, None] - center.i) ** 2 + (idx[None, :] - center.j) ** 2
    return ValueField(field.resolution, field.values + peak * np.exp(-d2 / (2.0 * width * width)))


def contaminate(field: ValueField, sigma: float, rng: np.random.Generator) -> ValueField:
    """Add i.i.d. N(0, sigma^2) noise to every cell; sigma 0 is the identity."""
    if not (math.isfinite(sigma) and sigma >= 0):
        raise ConfigError(f"noise sigma must be >= 0, got {sigma}")
    noise = rng.normal(0.0, sigma, size=field.values.shape)
    return ValueField(field.resolution, field.values + noise)


def gradient_at(field: ValueField, cell: GridCell) -> np.ndarray:
    """Finite-difference gradient (d/di, d/dj) in value per cell.

    Central differences in the interior, one-sided on the boundary.
    """
    if not field.in_bounds(cell):
        raise ConfigError(f"cell {cell} outside grid")
    v = field.values
    r = field.resolution
    i, j = cell.i, cell.j
    if 0 < i < r - 1:
        gi = (v[i + 1, j] - v[i - 1, j]) / 2.0
    elif i == 0:
        gi = v[1, j] - v[0, j]
    else:
        gi = v[r - 1, j] - v[r - 2, j]
    if 0 < j < r - 1:
        gj = (v[i, j + 1] - v[i, j - 1]) / 2.0
    elif j == 0:
        gj = v[i, 1] - v[i, 0]
    else:
        gj = v[i, r - 1] - v[i, r - 2]
    return np.array([gi, gj], dtype=float)


def moore_neighbors(cell: GridCell, resolution: int) -> list[GridCell]:
    """In-bounds 8-neighborhood of a cell, ordered by (i, j)."""
    out = []
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            ni, nj = cell.i + di, cell.j + dj
            if 0 <= ni < resolution and 0 <= nj < resolution:
                out.append(GridCell(ni, nj))
    return out


def steepest_neighbor(field: ValueField, cell: GridCell) -> GridCell:
    """Highest-valued in-bounds Moore neighbor, or the cell itself.

    Returns `cell` when no neighbor strictly improves on it; ties between
    equally good neighbors resolve to the lowest (i, j).
    """
    best = cell
    best_val = field.value_at(cell)
    for nb in moore_neighbors(cell, field.resolution):
        v = field.value_at(nb)
        if v > best_val:
            best, best_val = nb, v
    return best
