#!/usr/bin/env python3
"""Discrete unit vector fields on the square [0, L]^2.

Fields are sampled at cell centers of an N x N grid. Array axis 0 runs
along x1, axis 1 along x2, so ``theta[i, j]`` is the angle at
((i + 1/2) h, (j + 1/2) h) with h = L / N.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import fftconvolve

from lab.circlegeom import UnitVec
from lab.entropy import JumpConfig
from lab.errors import DomainError, GridMismatchError, ResolutionError

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 0.15
MIN_CELLS_PER_SCALE = 2.0


def cell_centers(n: int, length: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Coordinates (x1, x2) of the cell centers, each of shape (n, n)."""
    axis = (np.arange(n) + 0.5) * (length / n)
    return np.meshgrid(axis, axis, indexing='ij')


def interior_mask(n: int, length: float = 1.0, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    """Cells whose centers lie in [margin, L - margin]^2 (the interior window U)."""
    x1, x2 = cell_centers(n, length)
    lo, hi = margin, length - margin
    return (x1 >= lo) & (x1 <= hi) & (x2 >= lo) & (x2 <= hi)


def line_length_in_window(point: Tuple[float, float], normal: UnitVec, length: float = 1.0,
                          margin: float = DEFAULT_MARGIN) -> float:
    """Length of the line through point with the given normal inside [margin, L - margin]^2."""
    tangent = (-normal.y, normal.x)
    lo, hi = margin, length - margin
    s_min, s_max = -math.inf, math.inf
    for p, d in zip(point, tangent):
        if abs(d) < 1e-15:
            if not lo <= p <= hi:
                return 0.0
            continue
        a, b = (lo - p) / d, (hi - p) / d
        s_min, s_max = max(s_min, min(a, b)), min(s_max, max(a, b))
    return max(0.0, s_max - s_min)


@dataclass(frozen=True, eq=False)
class AngleField:
    """Grid-sampled angle field theta with a mask of singular cells."""

    theta: np.ndarray
    mask: np.ndarray = None
    length: float = 1.0
    kind: str = 'custom'
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
            raise DomainError(f"angle field must be square, got shape {theta.shape}")
        mask = np.zeros(theta.shape, dtype=bool) if self.mask is None else np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, 'theta', theta)
        object.__setattr__(self, 'mask', mask)

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    @property
    def valid(self) -> np.ndarray:
        return ~self.mask

    def vectors(self) -> np.ndarray:
        """Unit vectors (cos theta, sin theta); masked cells hold zero."""
        values = np.stack([np.cos(self.theta), np.sin(self.theta)], axis=-1)
        values[self.mask] = 0.0
        return values

    def unit_vec(self, i: int, j: int) -> UnitVec:
        if self.mask[i, j]:
            raise DomainError(f"cell ({i}, {j}) is masked")
        return UnitVec.from_angle(float(self.theta[i, j]))

    def rotated90(self) -> 'AngleField':
        """Field rotated by a quarter turn about the domain center (values rotate too)."""
        return AngleField(np.rot90(self.theta) + 0.5 * math.pi, np.rot90(self.mask),
                          self.length, self.kind, dict(self.meta))

    def translated(self, shift: Tuple[int, int]) -> 'AngleField':
        """Periodic translation by whole grid steps."""
        return AngleField(np.roll(self.theta, shift, axis=(0, 1)), np.roll(self.mask, shift, axis=(0, 1)),
                          self.length, self.kind, dict(self.meta))


@dataclass(frozen=True, eq=False)
class VecField:
    """Plane-valued grid field, e.g. a mollified unit vector field."""

    values: np.ndarray
    valid: np.ndarray
    length: float = 1.0
    epsilon: Optional[float] = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    def norm(self) -> np.ndarray:
        return np.hypot(self.values[..., 0], self.values[..., 1])


GridField = Union[AngleField, VecField]


def field_arrays(grid_field: GridField) -> Tuple[np.ndarray, np.ndarray]:
    """(values[n, n, 2], valid[n, n]) for either field type."""
    if isinstance(grid_field, AngleField):
        return grid_field.vectors(), grid_field.valid
    return grid_field.values, grid_field.valid


def require_resolved(scale: float, spacing: float, name: str) -> None:
    if scale < MIN_CELLS_PER_SCALE * spacing * (1.0 - 1e-12):
        raise ResolutionError(
            f"{name}={scale:.6g} is below {MIN_CELLS_PER_SCALE:g} grid spacings (h={spacing:.6g})")


def make_jump_field(jump: JumpConfig, point: Tuple[float, float] = (0.5, 0.5),
                    n: int = 256, length: float = 1.0) -> AngleField:
    """theta = theta+ where (x - p) . nu > 0 and theta- elsewhere."""
    jump.require_admissible()
    x1, x2 = cell_centers(n, length)
    side = (x1 - point[0]) * jump.normal.x + (x2 - point[1]) * jump.normal.y
    theta = np.where(side > 0.0, jump.theta_plus, jump.theta_minus)
    return AngleField(theta, None, length, 'jump',
                      {'jump': jump.to_dict(), 'point': list(point)})


def make_piecewise_field(jump: JumpConfig, width: float, point: Tuple[float, float] = (0.5, 0.5),
                         n: int = 256, length: float = 1.0) -> AngleField:
    """Strip of theta+ of the given width inside theta-; two parallel admissible jumps."""
    jump.require_admissible()
    if width <= 0.0:
        raise DomainError(f"strip width must be positive, got {width}")
    x1, x2 = cell_centers(n, length)
    side = (x1 - point[0]) * jump.normal.x + (x2 - point[1]) * jump.normal.y
    theta = np.where((side > 0.0) & (side <= width), jump.theta_plus, jump.theta_minus)
    return AngleField(theta, None, length, 'piecewise',
                      {'jump': jump.to_dict(), 'point': list(point), 'width': width})


def make_vortex_field(center: Tuple[float, float] = (0.5, 0.5), sign: int = 1,
                      n: int = 256, length: float = 1.0) -> AngleField:
    """Vortex m(x) = sign (x - p)^perp / |x - p|; the cell containing p is masked."""
    if sign not in (1, -1):
        raise DomainError(f"vortex sign must be +1 or -1, got {sign}")
    if not (0.0 < center[0] < length and 0.0 < center[1] < length):
        raise DomainError(f"vortex center {center} lies outside the domain")
    x1, x2 = cell_centers(n, length)
    d1, d2 = x1 - center[0], x2 - center[1]
    theta = np.arctan2(sign * d1, -sign * d2)
    mask = np.hypot(d1, d2) == 0.0
    h = length / n
    i = min(int(math.floor(center[0] / h)), n - 1)
    j = min(int(math.floor(center[1] / h)), n - 1)
    mask[i, j] = True
    theta[mask] = 0.0
    return AngleField(theta, mask, length, 'vortex', {'center': list(center), 'sign': sign})


def make_smooth_field(slope: float = 2.0, n: int = 256, length: float = 1.0) -> AngleField:
    """theta = slope * x1; Lipschitz, used as the better-than-critical reference."""
    x1, _ = cell_centers(n, length)
    return AngleField(slope * x1, None, length, 'smooth', {'slope': slope})


def kernel_profile(u) -> np.ndarray:
    """Radial profile: 1 on [0, 1/2], smooth bump descent on (1/2, 1), 0 beyond."""
    u = np.asarray(u, dtype=float)
    v = np.clip(2.0 * u - 1.0, 0.0, 1.0)
    inner = np.where(v < 1.0, 1.0 - v * v, 1.0)
    descent = np.where(v < 1.0, np.exp(1.0 - 1.0 / inner), 0.0)
    return np.where(u <= 0.5, 1.0, descent)


@dataclass(frozen=True, eq=False)
class Mollifier:
    """Normalized discrete kernel supported in the disc of radius epsilon."""

    epsilon: float
    spacing: float
    radius: int
    kernel: np.ndarray

    @classmethod
    def build(cls, epsilon: float, n: int, length: float = 1.0) -> 'Mollifier':
        h = length / n
        require_resolved(epsilon, h, 'epsilon')
        radius = int(math.ceil(epsilon * n / length - 1e-9))
        offsets = np.arange(-radius, radius + 1) * h
        o1, o2 = np.meshgrid(offsets, offsets, indexing='ij')
        kernel = kernel_profile(np.hypot(o1, o2) / epsilon)
        kernel /= kernel.sum()
        return cls(epsilon, h, radius, kernel)


def mollify(grid_field: GridField, mollifier: Mollifier) -> VecField:
    """Convolve the field with the kernel, renormalizing over valid cells.

    Cells outside the domain and masked cells carry no weight, so the
    result is a convex average of unit vectors and |m_eps| <= 1.
    """
    values, valid = field_arrays(grid_field)
    if abs(grid_field.spacing - mollifier.spacing) > 1e-12 * grid_field.spacing:
        raise GridMismatchError("mollifier was built for a different grid")
    weight = valid.astype(float)
    denom = fftconvolve(weight, mollifier.kernel, mode='same')
    numer = np.stack([fftconvolve(values[..., c] * weight, mollifier.kernel, mode='same')
                      for c in range(2)], axis=-1)
    covered = denom > 1e-12
    result = np.zeros_like(numer)
    result[covered] = numer[covered] / denom[covered, None]

    # FFT round-off can push convex averages a hair above 1
    norm = np.hypot(result[..., 0], result[..., 1])
    over = norm > 1.0
    result[over] /= norm[over, None]
    if not covered.all():
        logger.debug("mollify: %d cells without support", int((~covered).sum()))
    return VecField(result, covered, grid_field.length, mollifier.epsilon)


def _shift_slices(n: int, d: int) -> Tuple[slice, slice]:
    """(base, shifted) slices so that base index i pairs with i + d."""
    if d >= 0:
        return slice(0, n - d), slice(d, n)
    return slice(-d, n), slice(0, n + d)


def increment(grid_field: GridField, displacement: Tuple[int, int]) -> VecField:
    """D^z m(x) = m(x + z) - m(x) for an integer grid displacement z, zero-extended."""
    values, valid = field_arrays(grid_field)
    n = values.shape[0]
    dz1, dz2 = int(displacement[0]), int(displacement[1])
    out = np.zeros_like(values)
    if abs(dz1) < n and abs(dz2) < n:
        b1, s1 = _shift_slices(n, dz1)
        b2, s2 = _shift_slices(n, dz2)
        both = valid[b1, b2] & valid[s1, s2]
        diff = values[s1, s2] - values[b1, b2]
        out[b1, b2] = np.where(both[..., None], diff, 0.0)
    return VecField(out, np.ones((n, n), dtype=bool), grid_field.length)


def grid_displacement(h: float, direction: Tuple[float, float], spacing: float) -> Tuple[int, int]:
    """Nearest integer displacement to h * e in units of the grid spacing."""
    require_resolved(h, spacing, 'h')
    norm = math.hypot(direction[0], direction[1])
    if norm == 0.0:
        raise DomainError("direction must be nonzero")
    return (int(round(h * direction[0] / norm / spacing)),
            int(round(h * direction[1] / norm / spacing)))


@dataclass(frozen=True)
class Bump:
    """Smooth test function exp(1 - 1/(1 - r^2/R^2)) supported in a disc."""

    center: Tuple[float, float] = (0.5, 0.5)
    radius: float = 0.3

    def _u(self, x1, x2):
        return ((x1 - self.center[0]) ** 2 + (x2 - self.center[1]) ** 2) / self.radius ** 2

    def value(self, x1, x2) -> np.ndarray:
        u = self._u(x1, x2)
        inside = u < 1.0
        safe = np.where(inside, 1.0 - u, 1.0)
        return np.where(inside, np.exp(1.0 - 1.0 / safe), 0.0)

    def gradient(self, x1, x2) -> np.ndarray:
        u = self._u(x1, x2)
        inside = u < 1.0
        safe = np.where(inside, 1.0 - u, 1.0)
        factor = np.where(inside, -self.value(x1, x2) / safe ** 2 * 2.0 / self.radius ** 2, 0.0)
        return np.stack([factor * (x1 - self.center[0]), factor * (x2 - self.center[1])], axis=-1)

    def line_integral(self, point: Tuple[float, float], normal: UnitVec, samples: int = 4001) -> float:
        """Integral of the bump along the line through point with the given normal."""
        tangent = np.array([-normal.y, normal.x])
        # foot of the perpendicular from the center
        offset = np.array(self.center) - np.array(point)
        foot = np.array(point) + tangent * float(offset @ tangent)
        s = np.linspace(-self.radius, self.radius, samples)
        values = self.value(foot[0] + s * tangent[0], foot[1] + s * tangent[1])
        return float(trapezoid(values, s))


def weak_divergence(grid_field: AngleField, bump: Bump) -> float:
    """<div m, zeta> = -sum m . grad zeta over valid cells (summation by parts)."""
    x1, x2 = cell_centers(grid_field.n, grid_field.length)
    values, valid = field_arrays(grid_field)
    grad = bump.gradient(x1, x2)
    integrand = np.sum(values * grad, axis=-1)
    return float(-np.sum(integrand[valid]) * grid_field.cell_area)


def _run_lengths(mask: np.ndarray) -> List[int]:
    """Alternating run lengths of the flattened mask, starting with unmasked cells."""
    flat = mask.reshape(-1).astype(np.int8)
    changes = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate(([0], changes, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat.size and flat[0]:
        runs.insert(0, 0)
    return [int(r) for r in runs]


def _mask_from_runs(runs: List[int], n: int) -> np.ndarray:
    flat = np.zeros(n * n, dtype=bool)
    position, current = 0, False
    for run in runs:
        flat[position:position + run] = current
        position += run
        current = not current
    if position != n * n:
        raise DomainError(f"mask runs cover {position} cells, expected {n * n}")
    return flat.reshape(n, n)


def write_field(grid_field: AngleField, path: Path) -> Tuple[Path, Path]:
    """Write the JSON sidecar ``path`` and the raw float64 angles next to it."""
    path = Path(path)
    data_path = path.with_suffix('.bin')
    path.parent.mkdir(parents=True, exist_ok=True)
    grid_field.theta.astype('<f8').tofile(data_path)
    sidecar = {
        'n': grid_field.n,
        'l': grid_field.length,
        'mask': _run_lengths(grid_field.mask),
        'kind': grid_field.kind,
        'meta': grid_field.meta,
        'data': data_path.name,
    }
    with open(path, 'w') as f:
        json.dump(sidecar, f, indent=2)
    return path, data_path


def read_field(path: Path) -> AngleField:
    """Read a field written by ``write_field``."""
    path = Path(path)
    with open(path, 'r') as f:
        sidecar = json.load(f)
    n = int(sidecar['n'])
    data_path = path.parent / sidecar.get('data', path.with_suffix('.bin').name)
    theta = np.fromfile(data_path, dtype='<f8')
    if theta.size != n * n:
        raise DomainError(f"{data_path} holds {theta.size} values, expected {n * n}")
    mask = _mask_from_runs(sidecar.get('mask', [n * n]), n)
    return AngleField(theta.reshape(n, n), mask, float(sidecar.get('l', 1.0)),
                      sidecar.get('kind', 'custom'), sidecar.get('meta', {}))
