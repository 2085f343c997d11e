#!/usr/bin/env python3
"""Maxwellian, kinetic measures of jump fields and weak checks of the kinetic equation.

The kinetic formulation reads e^{is} . grad_x chi(x, s) = d/ds sigma with
chi(x, s) = 1 if e^{is} . m(x) > 0. For a single admissible jump sigma is
S(s) ds times the length measure on the jump line, with S the zero-mean
angular antiderivative of (e^{is} . nu)(chi(m+, s) - chi(m-, s)).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from lab.circlegeom import (
    TWO_PI,
    TrigPolynomial,
    UnitVec,
    circle_nodes,
    wrap_angle,
)
from lab.cost import g_beta
from lab.entropy import JumpConfig, build_entropy, entropy_generator
from lab.errors import DomainError, SamplingError
from lab.fields import (
    DEFAULT_MARGIN,
    AngleField,
    Bump,
    cell_centers,
)
from lab.production import entropy_production

logger = logging.getLogger(__name__)

MIN_KINETIC_SAMPLES = 256
MEAN_TOL = 1e-10
# e^{is} . m within roundoff of 0 counts as the boundary set, where chi = 0
CHI_TOL = 1e-12
# same convention in units of the angular step
_NODE_TOL = 1e-9


def maxwellian(m: UnitVec, s: float) -> int:
    """chi(m, s) = 1 iff e^{is} . m > 0."""
    return int(math.cos(s) * m.x + math.sin(s) * m.y > CHI_TOL)


def chi(theta, s) -> np.ndarray:
    """Broadcast chi for angle arrays: 1.0 where cos(s - theta) > 0."""
    return (np.cos(np.asarray(s) - np.asarray(theta)) > CHI_TOL).astype(float)


def psi_of(f: TrigPolynomial) -> TrigPolynomial:
    """psi_f, the generator shared with build_entropy."""
    return entropy_generator(f)


def _arc_weights(k: np.ndarray) -> np.ndarray:
    # integral of e^{iks} over a half circle centered at 0
    quarter = np.array([0.0, 1.0, 0.0, -1.0])[np.mod(k, 4)]
    safe = np.where(k == 0, 1, k)
    return np.where(k == 0, math.pi, 2.0 * quarter / safe)


def _moment_exact(psi: TrigPolynomial, theta: np.ndarray) -> np.ndarray:
    degree = psi.degree
    coeffs = psi.to_complex()
    k = np.arange(-degree, degree + 1) + 1
    phases = np.exp(1j * np.multiply.outer(theta, k))
    z = phases @ (coeffs * _arc_weights(k))
    return np.stack([z.real, z.imag], axis=-1)


def _moment_quadrature(psi: TrigPolynomial, theta: np.ndarray, samples: int) -> np.ndarray:
    """Rectangle rule over the nodes strictly inside each half circle, via prefix sums."""
    step = TWO_PI / samples
    s = circle_nodes(samples)
    weights = psi.evaluate(s) * np.exp(1j * s) * step
    prefix = np.concatenate(([0.0], np.cumsum(np.concatenate((weights, weights)))))
    lo = np.floor((theta - 0.5 * math.pi) / step + _NODE_TOL).astype(np.int64) + 1
    hi = np.ceil((theta + 0.5 * math.pi) / step - _NODE_TOL).astype(np.int64) - 1
    start = np.mod(lo, samples)
    z = prefix[start + (hi - lo) + 1] - prefix[start]
    return np.stack([z.real, z.imag], axis=-1)


def velocity_moment(psi: TrigPolynomial, theta, samples: Optional[int] = None) -> np.ndarray:
    """Integral over s of psi(s) chi(theta, s) e^{is}, as plane vectors [..., 2].

    Exact per Fourier mode when samples is None, otherwise an M-point
    quadrature of the Maxwellian. For psi = psi_f this equals -Phi_f(e^{i theta}).
    """
    theta = np.asarray(theta, dtype=float)
    if samples is None:
        return _moment_exact(psi, theta)
    if samples < MIN_KINETIC_SAMPLES:
        raise SamplingError(f"velocity moment needs at least {MIN_KINETIC_SAMPLES} samples, got {samples}")
    return _moment_quadrature(psi, theta, samples)


def maxwellian_average(m: UnitVec, samples: int = 1024) -> np.ndarray:
    """(1/2) integral of e^{is} chi(m, s) ds; equals m up to quadrature error."""
    return 0.5 * velocity_moment(TrigPolynomial.constant(1.0), m.angle, samples)


@dataclass(frozen=True, eq=False)
class KineticDensity:
    """Per-unit-length angular density S(s_k) at the nodes s_k = 2 pi k / M."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size < MIN_KINETIC_SAMPLES:
            raise SamplingError(f"kinetic density needs at least {MIN_KINETIC_SAMPLES} samples")
        object.__setattr__(self, 'values', values)
        if self.mean_defect > MEAN_TOL:
            raise DomainError(f"kinetic density must have zero mean, got {self.mean_defect:.3e}")

    @property
    def samples(self) -> int:
        return int(self.values.size)

    @property
    def nodes(self) -> np.ndarray:
        return circle_nodes(self.samples)

    @property
    def mean_defect(self) -> float:
        return abs(float(np.sum(self.values))) * TWO_PI / self.values.size

    @property
    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values))) * TWO_PI / self.samples

    def pair(self, psi: TrigPolynomial) -> float:
        """Integral of psi(s) S(s) ds."""
        return float(np.sum(psi.evaluate(self.nodes) * self.values)) * TWO_PI / self.samples

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        table = np.column_stack([self.nodes, self.values])
        np.savetxt(path, table, fmt='%.15e', delimiter=',', header='s,S', comments='')
        return path

    @classmethod
    def from_csv(cls, path: Path) -> 'KineticDensity':
        table = np.loadtxt(Path(path), delimiter=',', skiprows=1, ndmin=2)
        if table.shape[1] != 2:
            raise SamplingError(f"{path}: expected two columns (s, S)")
        if not np.allclose(table[:, 0], circle_nodes(table.shape[0]), atol=1e-12):
            raise SamplingError(f"{path}: angles are not equispaced nodes")
        return cls(table[:, 1])


def _half_circle_primitive(theta: float, normal: UnitVec, s: np.ndarray) -> np.ndarray:
    """Integral over [0, s] of (e^{iu} . nu) chi(theta, u) du, exact."""
    def primitive(u):
        return normal.x * np.sin(u) - normal.y * np.cos(u)

    theta = wrap_angle(theta)
    total = np.zeros_like(s)
    for lap in (-1, 0, 1):
        start = theta - 0.5 * math.pi + TWO_PI * lap
        left = np.clip(start, 0.0, s)
        right = np.clip(start + math.pi, 0.0, s)
        total += primitive(right) - primitive(left)
    return total


def sigma_jump(jump: JumpConfig, samples: int = 4096) -> KineticDensity:
    """Kinetic density of a single admissible jump, normalized to zero mean."""
    jump.require_admissible()
    if samples < MIN_KINETIC_SAMPLES:
        raise SamplingError(f"sigma_jump needs M >= {MIN_KINETIC_SAMPLES}, got {samples}")
    s = circle_nodes(samples)
    values = (_half_circle_primitive(jump.theta_plus, jump.normal, s)
              - _half_circle_primitive(jump.theta_minus, jump.normal, s))
    values -= np.mean(values)
    density = KineticDensity(values)
    logger.debug("sigma_jump: M=%d, |S|_1=%.6f", samples, density.l1_norm)
    return density


def compare_with_profile(density: KineticDensity, beta: float) -> Tuple[int, float]:
    """(sign, L1 distance) of S against +-g_beta; the sign with the smaller distance wins."""
    profile = g_beta(beta, density.nodes)
    weight = TWO_PI / density.samples
    plus = float(np.sum(np.abs(density.values - profile))) * weight
    minus = float(np.sum(np.abs(density.values + profile))) * weight
    return (1, plus) if plus <= minus else (-1, minus)


def jump_config_of(grid_field: AngleField) -> JumpConfig:
    """The JumpConfig recorded by the jump generator."""
    meta = grid_field.meta
    if grid_field.kind != 'jump' or 'jump' not in meta:
        raise DomainError(f"closed-form sigma needs a jump field, got kind '{grid_field.kind}'")
    raw = meta['jump']
    return JumpConfig(raw['theta_plus'], raw['theta_minus'], UnitVec(*raw['normal']))


@dataclass(frozen=True)
class LineSigma:
    """sigma = S(s) ds times the length measure on the line through point with normal nu."""

    density: KineticDensity
    point: Tuple[float, float] = (0.5, 0.5)
    normal: UnitVec = UnitVec(1.0, 0.0)

    @classmethod
    def for_field(cls, grid_field: AngleField, samples: int = 4096) -> 'LineSigma':
        """Build sigma from the metadata of a generated jump field."""
        jump = jump_config_of(grid_field)
        return cls(sigma_jump(jump, samples), tuple(grid_field.meta.get('point', (0.5, 0.5))), jump.normal)

    def pair(self, bump: Bump, psi: TrigPolynomial) -> float:
        """Double integral of zeta(x) psi(s) d sigma."""
        return bump.line_integral(self.point, self.normal) * self.density.pair(psi)


def kinetic_pairing(grid_field: AngleField, psi: TrigPolynomial, bump: Bump,
                    samples: Optional[int] = None) -> float:
    """<nu, zeta x psi> = - sum over cells of grad zeta . (velocity moment of psi at m)."""
    x1, x2 = cell_centers(grid_field.n, grid_field.length)
    grad = bump.gradient(x1, x2)
    valid = grid_field.valid
    moments = velocity_moment(psi, grid_field.theta[valid], samples)
    return float(-np.sum(grad[valid] * moments) * grid_field.cell_area)


def kinetic_residual(grid_field: AngleField, sigma: Optional[LineSigma], bump: Bump,
                     psi: TrigPolynomial, samples: Optional[int] = None) -> float:
    """|<nu - d_s sigma, zeta x psi>|; sigma=None tests against the zero measure."""
    value = kinetic_pairing(grid_field, psi, bump, samples)
    if sigma is not None:
        value += sigma.pair(bump, psi.derivative())
    return abs(value)


@dataclass(frozen=True)
class DualityReport:
    """Both sides of <nu, zeta x psi_f> = -<div Phi_f(m), zeta>."""

    kinetic_side: float
    production_side: float
    sigma_side: Optional[float] = None

    @property
    def discrepancy(self) -> float:
        return abs(self.kinetic_side + self.production_side)

    @property
    def relative_discrepancy(self) -> float:
        scale = max(abs(self.kinetic_side), abs(self.production_side))
        if scale == 0.0:
            return 0.0
        return self.discrepancy / scale


def duality_check(grid_field: AngleField, f: TrigPolynomial, bump: Bump,
                  epsilon: Optional[float] = None, samples: int = 1024,
                  margin: float = DEFAULT_MARGIN, sigma: Optional[LineSigma] = None) -> DualityReport:
    """Kinetic pairing with psi_f (Maxwellian quadrature) against the entropy production of Phi_f.

    When sigma is given the report also carries the double integral of
    f zeta against sigma, which should equal <div Phi_f(m), zeta>.
    """
    if epsilon is None:
        epsilon = 4.0 * grid_field.spacing
    kinetic_side = kinetic_pairing(grid_field, psi_of(f), bump, samples)
    measure = entropy_production(grid_field, build_entropy(f), epsilon, margin)
    x1, x2 = cell_centers(grid_field.n, grid_field.length)
    production_side = measure.pair(bump.value(x1, x2))
    sigma_side = sigma.pair(bump, f) if sigma is not None else None
    report = DualityReport(kinetic_side, production_side, sigma_side)
    logger.debug("duality: kinetic=%.6e production=%.6e", kinetic_side, production_side)
    return report


def low_mode_pairings(grid_field: AngleField, bump: Bump,
                      samples: Optional[int] = None) -> Tuple[float, float, float]:
    """Kinetic pairings with psi in {1, cos s, sin s}; all vanish for divergence-free fields."""
    modes = (TrigPolynomial.constant(1.0), TrigPolynomial.mode(1, 'cos'), TrigPolynomial.mode(1, 'sin'))
    values = [kinetic_pairing(grid_field, psi, bump, samples) for psi in modes]
    return values[0], values[1], values[2]

