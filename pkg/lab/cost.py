#!/usr/bin/env python3
"""Jump cost c(s): the profile g_beta, its root t_beta and the closed form for c.

A jump of size s = 2 sin(beta) costs c(s) = ||g_beta||_{L^1(0, 2pi)} per unit
length. c is evaluated from the closed form; ``cost_quadrature`` integrates
|g_beta| directly and serves as an independent check.

c(s) > s^3/6, the production of Phi_{cos 2t}, for every s > 0. For small
jumps c(s) ~ s^3/3: the profile bump and the constant offset each contribute
4 beta^3/3 to the L^1 norm.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from lab.circlegeom import TrigPolynomial, quadrature_circle
from lab.entropy import JumpConfig, build_entropy, jump_pairing
from lab.errors import DomainError

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
ROOT_XTOL = 1e-12
PAIRING_SAMPLES = 8192
SMALL_JUMP_RATIO = 1.0 / 3.0


def _require_half_angle(beta: float) -> None:
    if not 0.0 <= beta <= HALF_PI * (1.0 + 1e-15):
        raise DomainError(f"half-angle beta={beta:.6g} outside [0, pi/2]")


def profile_offset(beta: float) -> float:
    """(2/pi)(sin beta - beta cos beta), the constant making g_beta mean zero."""
    return 2.0 / math.pi * (math.sin(beta) - beta * math.cos(beta))


def g_beta(beta: float, t):
    """pi-periodic even profile of a symmetric jump of half-angle beta.

    On [0, pi]: (sin t - cos beta) on |t - pi/2| <= beta, minus the offset.
    """
    u = np.mod(np.asarray(t, dtype=float), math.pi)
    inside = np.abs(u - HALF_PI) <= beta
    values = np.where(inside, np.sin(u) - math.cos(beta), 0.0) - profile_offset(beta)
    if values.ndim == 0:
        return float(values)
    return values


def t_beta(beta: float) -> float:
    """Root of sin t - cos beta = offset(beta) in [pi/2 - beta, pi/2], by bisection."""
    _require_half_angle(beta)
    offset = profile_offset(beta)
    cos_b = math.cos(beta)

    def residual(t: float) -> float:
        return math.sin(t) - cos_b - offset

    lo, hi = HALF_PI - beta, HALF_PI
    if hi - lo <= ROOT_XTOL or residual(hi) <= 0.0:
        return hi
    if residual(lo) >= 0.0:
        return lo
    return float(optimize.bisect(residual, lo, hi, xtol=ROOT_XTOL, maxiter=200))


def cost_from_beta(beta: float) -> float:
    """c(2 sin beta) = 4 [2 cos t_b - 2 (pi/2 - t_b)(cos beta + offset)]."""
    _require_half_angle(beta)
    if beta == 0.0:
        return 0.0
    root = t_beta(beta)
    value = 4.0 * (2.0 * math.cos(root)
                   - 2.0 * (HALF_PI - root) * (math.cos(beta) + profile_offset(beta)))
    return max(value, 0.0)


def cost(s: float) -> float:
    """Per-unit-length cost of a jump of size s in [0, 2]."""
    if not 0.0 <= s <= 2.0:
        raise DomainError(f"jump size s={s:.6g} outside [0, 2]")
    return cost_from_beta(math.asin(min(1.0, 0.5 * s)))


def cost_quadrature(beta: float) -> float:
    """4 * integral over [0, pi/2] of |g_beta| by adaptive quadrature."""
    _require_half_angle(beta)
    if beta == 0.0:
        return 0.0
    points = sorted({HALF_PI - beta, t_beta(beta)} - {0.0, HALF_PI})
    value, _ = integrate.quad(lambda t: abs(g_beta(beta, t)), 0.0, HALF_PI,
                              points=points or None, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 4.0 * value


@dataclass(frozen=True)
class CostPoint:
    beta: float
    s: float
    t_beta: float
    c_value: float

    @property
    def cubic_bound(self) -> float:
        """s^3 / 6, the strict lower bound."""
        return self.s ** 3 / 6.0

    @property
    def asymptote(self) -> float:
        """s^3 / 3, the small-jump asymptote."""
        return SMALL_JUMP_RATIO * self.s ** 3

    @property
    def strictness(self) -> float:
        return self.c_value - self.cubic_bound


def cost_point(beta: float) -> CostPoint:
    _require_half_angle(beta)
    return CostPoint(beta, 2.0 * math.sin(beta), t_beta(beta), cost_from_beta(beta))


def cost_curve(samples: int) -> List[CostPoint]:
    """Cost on the half-angle grid beta_k = k pi / (2 samples), k = 1..samples."""
    if samples < 1:
        raise DomainError(f"cost curve needs at least one sample, got {samples}")
    points = [cost_point(HALF_PI * k / samples) for k in range(1, samples + 1)]
    logger.debug("cost curve: %d points, c(2)=%.6f", samples, points[-1].c_value)
    return points


def small_jump_limit(sizes: Sequence[float]) -> Tuple[float, float]:
    """Extrapolate c(s) / s^3 to s = 0 with a line in s.

    Returns:
        (intercept, slope); the intercept estimates lim c(s) / s^3
    """
    sizes = np.asarray(sizes, dtype=float)
    if sizes.size < 2 or np.any(sizes <= 0.0):
        raise DomainError("small-jump extrapolation needs at least two positive sizes")
    ratios = np.array([cost(s) / s ** 3 for s in sizes])
    slope, intercept = np.polyfit(sizes, ratios, 1)
    return float(intercept), float(slope)


def pairing_identity_check(beta: float, f: TrigPolynomial, samples: int = PAIRING_SAMPLES) -> float:
    """|e1 . (Phi_f(e^{i beta}) - Phi_f(e^{-i beta})) - integral of g_beta f| over the circle."""
    _require_half_angle(beta)
    left = jump_pairing(build_entropy(f), JumpConfig.symmetric(beta))
    right = quadrature_circle(lambda t: g_beta(beta, t) * f.evaluate(t), samples)
    return abs(left - right)


def mass_strictness_check(beta: float) -> Tuple[float, float, float]:
    """(2 c(2 sin beta), (2 sin beta)^3 / 3, difference) for beta in (0, pi/2]."""
    if not 0.0 < beta <= HALF_PI * (1.0 + 1e-15):
        raise DomainError(f"half-angle beta={beta:.6g} outside (0, pi/2]")
    twice_cost = 2.0 * cost_from_beta(beta)
    cubic = (2.0 * math.sin(beta)) ** 3 / 3.0
    return twice_cost, cubic, twice_cost - cubic


def smoothed_sign_pairing(beta: float, delta: float, samples: int = PAIRING_SAMPLES) -> float:
    """Integral of g_beta tanh(g_beta / delta); tends to c(2 sin beta) as delta -> 0."""
    if delta <= 0.0:
        raise DomainError(f"smoothing width must be positive, got {delta}")
    _require_half_angle(beta)
    return quadrature_circle(lambda t: g_beta(beta, t) * np.tanh(g_beta(beta, t) / delta), samples)
