#!/usr/bin/env python3
"""Entropy production measures, Besov increments and mollification probes."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from lab.entropy import Entropy
from lab.errors import DomainError, GridMismatchError, SamplingError
from lab.fields import (
    DEFAULT_MARGIN,
    GridField,
    Mollifier,
    VecField,
    increment,
    interior_mask,
    mollify,
    require_resolved,
)

logger = logging.getLogger(__name__)

MIN_PROJECTION_NORM = 0.1
LUB_BLOCKS_PER_RADIUS = 4


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """Signed cell densities (per unit area) of a measure on the interior window."""

    density: np.ndarray
    cell_area: float
    margin: float
    region: np.ndarray
    masked_cells: int = 0
    label: str = ''

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.density[self.region])) * self.cell_area)

    def variation_on(self, subregion: np.ndarray) -> float:
        """Total variation restricted to a boolean subregion."""
        return float(np.sum(np.abs(self.density[self.region & subregion])) * self.cell_area)

    def pair(self, test: np.ndarray) -> float:
        """<mu, zeta> for a test function sampled at cell centers."""
        return float(np.sum(self.density * test) * self.cell_area)

    def same_grid(self, other: 'GridMeasure') -> bool:
        return self.density.shape == other.density.shape and math.isclose(self.cell_area, other.cell_area)


@dataclass(frozen=True)
class FitResult:
    """Least-squares line in log-log coordinates."""

    slope: float
    intercept: float
    residual: float

    @property
    def prefactor(self) -> float:
        return math.exp(self.intercept)


def _projected_angles(grid_field: GridField, epsilon: float,
                      min_norm: float) -> Tuple[np.ndarray, np.ndarray, VecField]:
    mollifier = Mollifier.build(epsilon, grid_field.n, grid_field.length)
    smoothed = mollify(grid_field, mollifier)
    norm = smoothed.norm()
    usable = smoothed.valid & (norm >= min_norm)
    angles = np.arctan2(smoothed.values[..., 1], smoothed.values[..., 0])
    return angles, usable, smoothed


def _centered_divergence(flux: np.ndarray, spacing: float) -> np.ndarray:
    """Centered-difference divergence; boundary cells and NaN stencils give NaN."""
    div = np.full(flux.shape[:2], np.nan)
    div[1:-1, 1:-1] = ((flux[2:, 1:-1, 0] - flux[:-2, 1:-1, 0])
                       + (flux[1:-1, 2:, 1] - flux[1:-1, :-2, 1])) / (2.0 * spacing)
    return div


def production_family(grid_field: GridField, entropies: Sequence[Entropy], epsilon: float,
                      margin: float = DEFAULT_MARGIN,
                      min_norm: float = MIN_PROJECTION_NORM) -> List[GridMeasure]:
    """Entropy productions div Phi(m_eps / |m_eps|) for several entropies, mollifying once.

    Cells with |m_eps| < min_norm are masked; so is every cell whose
    difference stencil touches one.
    """
    angles, usable, _ = _projected_angles(grid_field, epsilon, min_norm)
    region = interior_mask(grid_field.n, grid_field.length, margin)
    masked = int(np.sum(~usable & region))
    if masked:
        logger.info("entropy production: %d cells masked (|m_eps| < %.2g)", masked, min_norm)

    measures = []
    for entropy in entropies:
        flux = entropy.evaluate(angles)
        flux[~usable] = np.nan
        div = _centered_divergence(flux, grid_field.spacing)
        density = np.where(region & np.isfinite(div), div, 0.0)
        measures.append(GridMeasure(density, grid_field.cell_area, margin, region, masked, entropy.source))
    return measures


def entropy_production(grid_field: GridField, entropy: Entropy, epsilon: float,
                       margin: float = DEFAULT_MARGIN,
                       min_norm: float = MIN_PROJECTION_NORM) -> GridMeasure:
    """Cell densities of div Phi(m) computed on the mollified, projected field."""
    return production_family(grid_field, [entropy], epsilon, margin, min_norm)[0]


def lub_measure(measures: Sequence[GridMeasure], block: int = 1,
                offset: Tuple[int, int] = (0, 0)) -> GridMeasure:
    """Least upper bound of |mu_k| evaluated on a partition into block x block cells.

    block = 1 is the cellwise maximum (the fine-partition limit); larger
    blocks give sum over blocks of max_k |mu_k(block)|, spread uniformly over
    the block's interior cells. ``offset`` is a cell index at which a block
    starts along each axis.
    """
    if not measures:
        raise SamplingError("least upper bound of an empty family")
    first = measures[0]
    for other in measures[1:]:
        if not first.same_grid(other):
            raise GridMismatchError("measures live on different grids")
    if block < 1:
        raise DomainError(f"block size must be positive, got {block}")

    stack = np.stack([m.density for m in measures])
    if block == 1:
        density = np.max(np.abs(stack), axis=0)
    else:
        n = first.density.shape[0]
        front = [(block - int(o) % block) % block for o in offset]
        blocks = [-(-(n + f) // block) for f in front]
        pad = ((0, 0),) + tuple((f, b * block - n - f) for f, b in zip(front, blocks))
        shape = (blocks[0], block, blocks[1], block)
        sums = np.pad(stack, pad).reshape((len(measures),) + shape).sum(axis=(2, 4))
        best = np.max(np.abs(sums), axis=0)
        counts = np.pad(first.region, pad[1:]).reshape(shape).sum(axis=(1, 3))
        per_cell = np.divide(best, counts, out=np.zeros_like(best), where=counts > 0)
        spread = np.repeat(np.repeat(per_cell, block, axis=0), block, axis=1)
        density = spread[front[0]:front[0] + n, front[1]:front[1] + n]
        density = np.where(first.region, density, 0.0)
    return GridMeasure(density, first.cell_area, first.margin, first.region,
                       max(m.masked_cells for m in measures), 'lub')


def resolved_lub_measure(measures: Sequence[GridMeasure], radius_cells: int,
                         blocks_per_radius: int = LUB_BLOCKS_PER_RADIUS) -> GridMeasure:
    """Least upper bound on partitions coarser than the mollifier, independent of where the field jumps.

    Blocks have side ``blocks_per_radius * radius_cells``. A block edge crossing
    a transition layer splits its production and inflates the maximum, so the
    partition is chosen as the offset (swept in steps of radius_cells / 2)
    with the smallest total variation.
    """
    if radius_cells < 1:
        raise DomainError(f"mollifier radius must span at least one cell, got {radius_cells}")
    block = blocks_per_radius * radius_cells
    stride = max(1, radius_cells // 2)
    candidates = [lub_measure(measures, block, (o, o)) for o in range(0, block, stride)]
    best = min(candidates, key=lambda m: m.total_variation)
    logger.debug("resolved lub: block %d, %d offsets, TV %.6g..%.6g", block, len(candidates),
                 best.total_variation, max(m.total_variation for m in candidates))
    return best


def _displacements(radius_cells: float) -> List[Tuple[int, int]]:
    r = int(math.floor(radius_cells + 1e-9))
    out = []
    for dz1 in range(-r, r + 1):
        for dz2 in range(-r, r + 1):
            if (dz1 or dz2) and dz1 * dz1 + dz2 * dz2 <= radius_cells * radius_cells + 1e-9:
                out.append((dz1, dz2))
    return out


def increment_norm(grid_field: GridField, displacement: Tuple[int, int], power: float,
                   region: np.ndarray) -> float:
    """Integral over the region of |D^z m|^power."""
    diff = increment(grid_field, displacement).values
    magnitude = np.hypot(diff[..., 0], diff[..., 1])
    return float(np.sum(magnitude[region] ** power) * grid_field.cell_area)


def besov_seminorm(grid_field: GridField, t: float, margin: float = DEFAULT_MARGIN,
                   region: Optional[np.ndarray] = None) -> float:
    """N_t(m, U) = max over integer |z| <= t of t^{-1/3} ||D^z m||_{L^3(U)}."""
    require_resolved(t, grid_field.spacing, 't')
    if t > grid_field.length / 4.0 * (1.0 + 1e-12):
        raise DomainError(f"t={t:.6g} exceeds L/4")
    if region is None:
        region = interior_mask(grid_field.n, grid_field.length, margin)
    best = 0.0
    for z in _displacements(t / grid_field.spacing):
        best = max(best, increment_norm(grid_field, z, 3.0, region))
    return t ** (-1.0 / 3.0) * best ** (1.0 / 3.0)


def grad_cubed_probe(grid_field: GridField, epsilon: float, margin: float = DEFAULT_MARGIN) -> float:
    """Integral over U of |grad m_eps|^3 (centered differences)."""
    mollifier = Mollifier.build(epsilon, grid_field.n, grid_field.length)
    smoothed = mollify(grid_field, mollifier)
    h = grid_field.spacing
    grad_sq = np.zeros(smoothed.values.shape[:2])
    for axis in (0, 1):
        deriv = np.gradient(smoothed.values, h, axis=axis)
        grad_sq += np.sum(deriv ** 2, axis=-1)
    region = interior_mask(grid_field.n, grid_field.length, margin) & smoothed.valid
    return float(np.sum(grad_sq[region] ** 1.5) * grid_field.cell_area)


def defect_probe(grid_field: GridField, epsilon: float, margin: float = DEFAULT_MARGIN) -> float:
    """Integral over U of (1 - |m_eps|^2)^{3/2}."""
    mollifier = Mollifier.build(epsilon, grid_field.n, grid_field.length)
    smoothed = mollify(grid_field, mollifier)
    defect = np.clip(1.0 - smoothed.norm() ** 2, 0.0, None)
    region = interior_mask(grid_field.n, grid_field.length, margin)
    return float(np.sum(defect[region] ** 1.5) * grid_field.cell_area)


def fit_exponent(pairs: Iterable[Tuple[float, float]]) -> FitResult:
    """Ordinary least-squares slope of log v against log x."""
    data = np.asarray(list(pairs), dtype=float)
    if data.ndim != 2 or data.shape[0] < 3:
        raise SamplingError("exponent fit needs at least 3 pairs")
    if np.any(data <= 0.0):
        raise DomainError("exponent fit needs strictly positive values")
    logs = np.log(data)
    slope, intercept = np.polyfit(logs[:, 0], logs[:, 1], 1)
    residuals = logs[:, 1] - (slope * logs[:, 0] + intercept)
    result = FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(residuals ** 2))))
    logger.debug("fit_exponent: slope=%.4f residual=%.2e", result.slope, result.residual)
    return result
