#!/usr/bin/env python3
"""Interaction kernel phi, the quantity Xi and the Jin-Kohn quartic diagnostics.

Xi(m1, m2) is the double angular integral

    Xi = iint phi(xi, eta) (xi ^ eta) (chi_m1 - chi_m2)(xi) (chi_m1 - chi_m2)(eta)

which depends only on the half-angle beta between m1 and m2 and has the closed
form 8(2 beta - sin 2 beta) for beta <= pi/4, 8(sin 2 beta + 2 beta - 2) above.
Field integrals use the closed form; ``delta_quadrature`` keeps the double
integral as a cross-check.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from lab.circlegeom import TWO_PI, TrigPolynomial, UnitVec, circle_nodes
from lab.entropy import jin_kohn, jin_kohn_direct
from lab.errors import DomainError, SamplingError
from lab.fields import DEFAULT_MARGIN, AngleField, grid_displacement, increment, interior_mask

logger = logging.getLogger(__name__)

QUARTER_PI = 0.25 * math.pi
HALF_PI = 0.5 * math.pi
MIN_DELTA_SAMPLES = 256
MIN_COERCIVITY_SAMPLES = 100
MIN_QUARTIC_PAIRS = 10_000
MIN_SEPARATION = 1e-3
BRANCH_SMALL = 'small'
BRANCH_LARGE = 'large'
# below this 2b - sin 2b loses digits to cancellation; use its series
_SERIES_CUTOFF = 1e-2


def phi_kernel(theta, psi):
    """phi(theta, psi) = phi~(psi - theta): +1 on (0, pi/2) mod pi, -1 on (pi/2, pi), 0 on the axes."""
    omega = np.mod(np.asarray(psi, dtype=float) - np.asarray(theta, dtype=float), math.pi)
    values = np.where(omega > 0.0, np.sign(HALF_PI - omega), 0.0)
    if values.ndim == 0:
        return int(values)
    return values.astype(int)


def _two_beta_minus_sin(beta: np.ndarray) -> np.ndarray:
    x = 2.0 * beta
    series = x ** 3 / 6.0 - x ** 5 / 120.0 + x ** 7 / 5040.0
    return np.where(beta < _SERIES_CUTOFF, series, x - np.sin(x))


def _xi_values(beta: np.ndarray) -> np.ndarray:
    small = 8.0 * _two_beta_minus_sin(beta)
    large = 8.0 * (np.sin(2.0 * beta) + 2.0 * beta - 2.0)
    return np.where(beta <= QUARTER_PI, small, large)


def xi_closed_form(beta: float) -> float:
    """Closed form of Xi at half-angle beta in [0, pi/2]."""
    if not 0.0 <= beta <= HALF_PI * (1.0 + 1e-15):
        raise DomainError(f"half-angle beta={beta:.6g} outside [0, pi/2]")
    return float(_xi_values(np.asarray(min(beta, HALF_PI))))


@dataclass(frozen=True)
class XiProfile:
    beta: float
    value: float
    branch: str


def xi_profile(beta: float) -> XiProfile:
    value = xi_closed_form(beta)
    return XiProfile(beta, value, BRANCH_SMALL if beta <= QUARTER_PI else BRANCH_LARGE)


def half_angle_between(theta1, theta2):
    """beta in [0, pi/2]: half of the unsigned angle between e^{i theta1} and e^{i theta2}."""
    diff = np.mod(np.asarray(theta2, dtype=float) - np.asarray(theta1, dtype=float) + math.pi, TWO_PI) - math.pi
    return 0.5 * np.abs(diff)


def xi_general(m1: UnitVec, m2: UnitVec) -> float:
    """Xi(m1, m2) through the half-angle reduction."""
    cross = m1.x * m2.y - m1.y * m2.x
    beta = 0.5 * abs(math.atan2(cross, m1.dot(m2)))
    return xi_closed_form(min(beta, HALF_PI))


def chi_cell_average(theta: float, samples: int) -> np.ndarray:
    """Average of chi(theta, .) over the cells [s_k - step/2, s_k + step/2]."""
    step = TWO_PI / samples
    d = np.mod(circle_nodes(samples) - theta + math.pi, TWO_PI) - math.pi
    overlap = np.minimum(d + 0.5 * step, HALF_PI) - np.maximum(d - 0.5 * step, -HALF_PI)
    return np.clip(overlap, 0.0, step) / step


def delta_quadrature(m1: UnitVec, m2: UnitVec, samples: int = 2048) -> float:
    """M x M angular quadrature of the Xi double integral (circular correlation by FFT).

    The Maxwellians enter as cell averages, so their jumps cost O(step^2)
    instead of O(step).
    """
    if samples < MIN_DELTA_SAMPLES:
        raise SamplingError(f"delta quadrature needs M >= {MIN_DELTA_SAMPLES}, got {samples}")
    s = circle_nodes(samples)
    diff = chi_cell_average(m1.angle, samples) - chi_cell_average(m2.angle, samples)
    # kernel phi~(omega) sin(omega) as a function of omega = eta - xi
    kernel = phi_kernel(0.0, s) * np.sin(s)
    correlated = np.fft.ifft(np.fft.fft(diff) * np.conj(np.fft.fft(kernel))).real
    step = TWO_PI / samples
    return float(np.dot(diff, correlated) * step * step)


def coercivity_ratio(beta) -> np.ndarray:
    """Xi(beta) / (2 sin beta)^3 for beta in (0, pi/2]."""
    beta = np.asarray(beta, dtype=float)
    return _xi_values(beta) / (2.0 * np.sin(beta)) ** 3


def coercivity_scan(samples: int = 10_000) -> Tuple[float, float]:
    """(min ratio, argmin beta) of Xi / |m1 - m2|^3 on the grid beta_k = k pi / (2K)."""
    if samples < MIN_COERCIVITY_SAMPLES:
        raise SamplingError(f"coercivity scan needs K >= {MIN_COERCIVITY_SAMPLES}, got {samples}")
    beta = HALF_PI * np.arange(1, samples + 1) / samples
    ratios = coercivity_ratio(beta)
    index = int(np.argmin(ratios))
    logger.info("coercivity: min ratio %.6f at beta=%.6f", ratios[index], beta[index])
    return float(ratios[index]), float(beta[index])


def delta_field_integral(grid_field: AngleField, h: float, direction: Tuple[float, float] = (1.0, 0.0),
                         margin: float = DEFAULT_MARGIN) -> float:
    """Integral over U of Xi(m(x + h e), m(x)); pairs leaving the grid contribute 0."""
    dz1, dz2 = grid_displacement(h, direction, grid_field.spacing)
    n = grid_field.n
    region = interior_mask(n, grid_field.length, margin)
    values = np.zeros((n, n))
    if abs(dz1) < n and abs(dz2) < n:
        b1 = slice(max(0, -dz1), min(n, n - dz1))
        b2 = slice(max(0, -dz2), min(n, n - dz2))
        s1 = slice(b1.start + dz1, b1.stop + dz1)
        s2 = slice(b2.start + dz2, b2.stop + dz2)
        valid = grid_field.valid
        both = valid[b1, b2] & valid[s1, s2]
        beta = half_angle_between(grid_field.theta[b1, b2], grid_field.theta[s1, s2])
        values[b1, b2] = np.where(both, _xi_values(beta), 0.0)
    return float(np.sum(values[region]) * grid_field.cell_area)


def jk_matrix(m: UnitVec) -> np.ndarray:
    """2x2 matrix with columns Sigma_{e1,e2}(m) and Sigma_{eps1,eps2}(m)."""
    return jk_points(m.angle)


def jk_points(theta) -> np.ndarray:
    """jk_matrix for an array of angles; shape [..., 2, 2]."""
    theta = np.asarray(theta, dtype=float)
    z = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    first = jin_kohn_direct(0.0, z)
    second = jin_kohn_direct(QUARTER_PI, z)
    return np.stack([first, second], axis=-1)


def jk_immersion_check(samples: int = 256) -> float:
    """Minimum speed |dX/dt| of t -> jk_matrix(e^{it}); positive means an immersion."""
    t = circle_nodes(samples)
    speed_sq = np.zeros(samples)
    for frame in (0.0, QUARTER_PI):
        entropy = jin_kohn(frame)
        speed_sq += entropy.P.derivative().evaluate(t) ** 2 + entropy.Q.derivative().evaluate(t) ** 2
    return float(np.sqrt(np.min(speed_sq)))


def _trig_difference(poly: TrigPolynomial, mean: np.ndarray, half: np.ndarray) -> np.ndarray:
    # f(a) - f(b) with mean = (a + b) / 2, half = (a - b) / 2, free of cancellation
    k = np.arange(1, poly.degree + 1)
    factor = 2.0 * np.sin(np.multiply.outer(half, k))
    phase = np.multiply.outer(mean, k)
    return (-np.sin(phase) * factor) @ poly.cos + (np.cos(phase) * factor) @ poly.sin


def jk_differences(theta1, theta2) -> np.ndarray:
    """jk_points(theta1) - jk_points(theta2), accurate for nearby angles; shape [..., 2, 2]."""
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    mean, half = 0.5 * (theta1 + theta2), 0.5 * (theta1 - theta2)
    columns = []
    for frame in (0.0, QUARTER_PI):
        entropy = jin_kohn(frame)
        columns.append(np.stack([_trig_difference(entropy.P, mean, half),
                                 _trig_difference(entropy.Q, mean, half)], axis=-1))
    return np.stack(columns, axis=-1)


def _quartic_ratios(theta1: np.ndarray, theta2: np.ndarray) -> np.ndarray:
    diff = jk_differences(theta1, theta2)
    det = diff[..., 0, 0] * diff[..., 1, 1] - diff[..., 0, 1] * diff[..., 1, 0]
    norm_sq = np.sum(diff ** 2, axis=(-2, -1))
    return det / norm_sq ** 2


def jk_quartic_ratio_closed_form(separation: float) -> float:
    """det(X - Y) / |X - Y|^4 for two points of K at angular separation delta."""
    s = math.sin(0.5 * separation)
    if abs(s) < 1e-15:
        raise DomainError("quartic ratio is undefined at zero separation")
    s2 = s * s
    det = 32.0 / 9.0 * s2 * s2 * (3.0 - 2.0 * s2)
    norm_sq = 8.0 * s2 + 8.0 / 9.0 * s2 * (3.0 - 4.0 * s2) ** 2
    return det / norm_sq ** 2


@dataclass(frozen=True)
class QuarticScan:
    minimum: float
    argmin_separation: float
    pairs: int
    positive: bool


def jk_quartic_scan(pairs: int = MIN_QUARTIC_PAIRS) -> QuarticScan:
    """Empirical constant in det(X - Y) >= C |X - Y|^4 over pairs of K.

    Half the budget is a uniform angular grid, the other half near-diagonal
    pairs at separations from 1e-3 up to the grid step.
    """
    if pairs < MIN_QUARTIC_PAIRS:
        raise SamplingError(f"quartic scan needs at least {MIN_QUARTIC_PAIRS} pairs, got {pairs}")
    grid = int(math.ceil(math.sqrt(pairs)))
    angles = circle_nodes(grid)
    i, j = np.triu_indices(grid, k=1)
    theta1, theta2 = angles[i], angles[j]

    refine = int(math.ceil(math.sqrt(pairs / 2.0)))
    bases = circle_nodes(refine)
    separations = np.geomspace(MIN_SEPARATION, TWO_PI / grid, refine)
    near1 = np.repeat(bases, refine)
    near2 = near1 + np.tile(separations, refine)

    theta1 = np.concatenate([theta1, near1])
    theta2 = np.concatenate([theta2, near2])
    separation = np.abs(half_angle_between(theta1, theta2)) * 2.0
    keep = separation >= MIN_SEPARATION * (1.0 - 1e-9)
    ratios = _quartic_ratios(theta1[keep], theta2[keep])
    index = int(np.argmin(ratios))
    scan = QuarticScan(float(ratios[index]), float(separation[keep][index]), int(keep.sum()),
                       bool(np.all(ratios > 0.0)))
    logger.info("jk quartic: min %.6g over %d pairs", scan.minimum, scan.pairs)
    return scan


def quartic_increment_integral(grid_field: AngleField, h: float, margin: float = DEFAULT_MARGIN) -> float:
    """max over e in {e1, e2} of the integral over U of |D^{he} m|^4."""
    region = interior_mask(grid_field.n, grid_field.length, margin)
    best = 0.0
    for direction in ((1.0, 0.0), (0.0, 1.0)):
        diff = increment(grid_field, grid_displacement(h, direction, grid_field.spacing)).values
        fourth = np.sum(diff ** 2, axis=-1) ** 2
        best = max(best, float(np.sum(fourth[region]) * grid_field.cell_area))
    return best
