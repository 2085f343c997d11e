#!/usr/bin/env python3
"""Entropies of the eikonal equation.

An entropy is a map Phi: S^1 -> R^2 with e^{it} . d/dt Phi(e^{it}) = 0.
Here every entropy is stored as a pair of trig polynomials (P, Q) with
Phi(e^{it}) = (P(t), Q(t)).

The family Phi_f is built from a circle function f in four exact steps:
drop the modes 0 and 1 of f, integrate once (psi_f), integrate psi_f i e^{is}
(phi_f), then combine two quarter-turn shifts of phi_f.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from lab.circlegeom import (
    E1,
    TrigPolynomial,
    UnitVec,
    antiderivative_zero_at_origin,
    circle_nodes,
    fourier_analyze,
    plane_from_complex,
    project_out_low_modes,
)
from lab.errors import AdmissibilityError, DomainError, SamplingError

logger = logging.getLogger(__name__)

DEFECT_TOL = 1e-8
ADMISSIBILITY_TOL = 1e-10

SOURCE_PIPELINE = 'pipeline'
SOURCE_JIN_KOHN = 'jin_kohn'
SOURCE_CUSTOM = 'custom'

# sin(n pi / 2) for n mod 4, kept exact so even modes vanish identically
_QUARTER_SINE = np.array([0.0, 1.0, 0.0, -1.0])


def c2_norm_of(P: TrigPolynomial, Q: TrigPolynomial) -> float:
    """Upper estimate sum_k k^2 (|a_k| + |b_k|) over both components."""
    total = 0.0
    for comp in (P, Q):
        k = np.arange(1, comp.degree + 1)
        total += float(np.sum(k * k * (np.abs(comp.cos) + np.abs(comp.sin))))
    return total


@dataclass(frozen=True, eq=False)
class Entropy:
    """Entropy Phi(e^{it}) = (P(t), Q(t)) with its provenance."""

    P: TrigPolynomial
    Q: TrigPolynomial
    source: str = SOURCE_CUSTOM
    frame_angle: Optional[float] = None
    c2_norm: float = field(default=-1.0)

    def __post_init__(self):
        if self.c2_norm < 0:
            object.__setattr__(self, 'c2_norm', c2_norm_of(self.P, self.Q))

    def evaluate(self, t) -> np.ndarray:
        """Values at angle(s) t, stacked on a trailing axis of length 2."""
        return np.stack([self.P.evaluate(t), self.Q.evaluate(t)], axis=-1)

    def at(self, m: UnitVec) -> np.ndarray:
        return self.evaluate(m.angle)

    def representation(self) -> np.ndarray:
        degree = max(self.P.degree, self.Q.degree, 1)
        return np.concatenate([self.P.padded(degree).coefficient_vector(),
                               self.Q.padded(degree).coefficient_vector()])

    def allclose(self, other: 'Entropy', tol: float = 1e-12) -> bool:
        return self.P.allclose(other.P, tol) and self.Q.allclose(other.Q, tol)

    def is_zero(self, tol: float = 1e-14) -> bool:
        return bool(np.max(np.abs(self.representation())) <= tol)

    def scaled(self, factor: float) -> 'Entropy':
        return Entropy(self.P * factor, self.Q * factor, self.source, self.frame_angle)

    def __add__(self, other: 'Entropy') -> 'Entropy':
        source = self.source if self.source == other.source else SOURCE_CUSTOM
        return Entropy(self.P + other.P, self.Q + other.Q, source)

    def __sub__(self, other: 'Entropy') -> 'Entropy':
        return self + other.scaled(-1.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'source': self.source,
            'frame_angle': self.frame_angle,
            'c2_norm': self.c2_norm,
            'P': self.P.to_dict(),
            'Q': self.Q.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Entropy':
        return cls(
            P=TrigPolynomial.from_dict(data.get('P', {})),
            Q=TrigPolynomial.from_dict(data.get('Q', {})),
            source=data.get('source', SOURCE_CUSTOM),
            frame_angle=data.get('frame_angle'),
        )


IDENTITY_ENTROPY = Entropy(TrigPolynomial.mode(1, 'cos'), TrigPolynomial.mode(1, 'sin'))


@dataclass(frozen=True)
class JumpConfig:
    """Single straight jump m- | m+ across a line with unit normal pointing to the + side."""

    theta_plus: float
    theta_minus: float
    normal: UnitVec = E1

    @classmethod
    def symmetric(cls, beta: float, rotation: float = 0.0) -> 'JumpConfig':
        """Jump theta+- = rotation +- beta with normal e^{i rotation} (always admissible)."""
        return cls(rotation + beta, rotation - beta, UnitVec.from_angle(rotation))

    @property
    def m_plus(self) -> UnitVec:
        return UnitVec.from_angle(self.theta_plus)

    @property
    def m_minus(self) -> UnitVec:
        return UnitVec.from_angle(self.theta_minus)

    @property
    def jump_size(self) -> float:
        diff = self.m_plus.as_array() - self.m_minus.as_array()
        return float(np.hypot(diff[0], diff[1]))

    @property
    def half_angle(self) -> float:
        """beta with jump_size = 2 sin(beta)."""
        return math.asin(min(1.0, 0.5 * self.jump_size))

    def admissibility_defect(self) -> float:
        diff = self.m_plus.as_array() - self.m_minus.as_array()
        return abs(float(diff @ self.normal.as_array()))

    def is_admissible(self, tol: float = ADMISSIBILITY_TOL) -> bool:
        return self.admissibility_defect() <= tol

    def require_admissible(self, tol: float = ADMISSIBILITY_TOL) -> None:
        defect = self.admissibility_defect()
        if defect > tol:
            raise AdmissibilityError(
                f"jump ({self.theta_plus:.6g}, {self.theta_minus:.6g}) is not admissible: "
                f"|(m+ - m-) . nu| = {defect:.3e}")

    def rotated(self, angle: float) -> 'JumpConfig':
        normal = UnitVec.from_angle(self.normal.angle + angle)
        return JumpConfig(self.theta_plus + angle, self.theta_minus + angle, normal)

    def to_dict(self) -> Dict[str, Any]:
        return {'theta_plus': self.theta_plus, 'theta_minus': self.theta_minus,
                'normal': [self.normal.x, self.normal.y]}


def entropy_generator(f: TrigPolynomial) -> TrigPolynomial:
    """psi_f: the antiderivative of f with modes 0 and 1 removed, taken mean-free.

    The constant left by psi(0) = 0 would add the trivial entropy
    -2 psi_0 z to Phi_f; it is dropped so that odd modes give exactly zero.
    """
    psi = antiderivative_zero_at_origin(project_out_low_modes(f))
    return TrigPolynomial(0.0, psi.cos, psi.sin)


def build_entropy(f: TrigPolynomial) -> Entropy:
    """Build Phi_f from a circle function f.

    The map f -> Phi_f is linear; odd modes of f and the modes 0, 1 give
    the zero entropy.
    """
    psi = entropy_generator(f)
    p = psi.to_complex()
    degree = psi.degree

    # psi(s) i e^{is}: mode n of the product is i p_{n-1}
    shifted = np.zeros(2 * degree + 3, dtype=complex)
    shifted[2:] = 1j * p
    n = np.arange(-(degree + 1), degree + 2)

    # phi_f = primitive vanishing at 0; its constant cancels in Phi_f
    phi = np.zeros_like(shifted)
    nonzero = n != 0
    phi[nonzero] = shifted[nonzero] / (1j * n[nonzero])

    # -i phi(t - pi/2) + i phi(t + pi/2) multiplies mode n by -2 sin(n pi / 2)
    factor = -2.0 * _QUARTER_SINE[np.mod(n, 4)]
    P, Q = plane_from_complex(phi * factor)
    entropy = Entropy(P, Q, SOURCE_PIPELINE)
    logger.debug("built Phi_f of degree %d, c2_norm=%.6g", P.degree, entropy.c2_norm)
    return entropy


_SIN_CUBED = TrigPolynomial(0.0, [0.0, 0.0, 0.0], [0.75, 0.0, -0.25])
_COS_CUBED = TrigPolynomial(0.0, [0.75, 0.0, 0.25], [0.0, 0.0, 0.0])


def jin_kohn(frame_angle: float) -> Entropy:
    """Cubic entropy (4/3)((z.a2)^3 a1 + (z.a1)^3 a2) for the frame a1 = e^{i alpha}, a2 = i a1."""
    sin3 = _SIN_CUBED.shift(frame_angle)
    cos3 = _COS_CUBED.shift(frame_angle)
    c, s = math.cos(frame_angle), math.sin(frame_angle)
    P = (4.0 / 3.0) * (c * sin3 - s * cos3)
    Q = (4.0 / 3.0) * (s * sin3 + c * cos3)
    return Entropy(P, Q, SOURCE_JIN_KOHN, frame_angle=frame_angle)


def jin_kohn_direct(frame_angle: float, z: np.ndarray) -> np.ndarray:
    """Closed-form evaluation of the Jin-Kohn entropy at plane vectors z[..., 2]."""
    a1 = np.array([math.cos(frame_angle), math.sin(frame_angle)])
    a2 = np.array([-a1[1], a1[0]])
    z = np.asarray(z, dtype=float)
    za1 = z @ a1
    za2 = z @ a2
    return (4.0 / 3.0) * (np.multiply.outer(za2 ** 3, a1) + np.multiply.outer(za1 ** 3, a2))


def entropy_defect(entropy: Entropy, samples: int = 1024) -> float:
    """max_t |e^{it} . d/dt Phi(e^{it})| over equispaced samples."""
    if samples < 64:
        raise SamplingError(f"entropy defect needs at least 64 samples, got {samples}")
    t = circle_nodes(samples)
    dP = entropy.P.derivative().evaluate(t)
    dQ = entropy.Q.derivative().evaluate(t)
    return float(np.max(np.abs(np.cos(t) * dP + np.sin(t) * dQ)))


def jump_pairing(entropy: Entropy, jump: JumpConfig) -> float:
    """Production density (Phi(m+) - Phi(m-)) . nu per unit jump length."""
    jump.require_admissible()
    delta = entropy.evaluate(jump.theta_plus) - entropy.evaluate(jump.theta_minus)
    return float(delta @ jump.normal.as_array())


def custom_entropy(samples_p: Sequence[float], samples_q: Sequence[float],
                   tol: float = DEFECT_TOL) -> Entropy:
    """Interpolate sampled components and certify the entropy condition."""
    entropy = Entropy(fourier_analyze(samples_p), fourier_analyze(samples_q), SOURCE_CUSTOM)
    defect = entropy_defect(entropy, max(64, 4 * len(samples_p)))
    if defect > tol:
        raise DomainError(f"sampled map is not an entropy: defect {defect:.3e} > {tol:.1e}")
    return entropy


def random_polynomial(degree: int, rng: np.random.Generator) -> TrigPolynomial:
    """Trig polynomial with coefficients uniform in [-1, 1]."""
    return TrigPolynomial(rng.uniform(-1.0, 1.0),
                          rng.uniform(-1.0, 1.0, degree),
                          rng.uniform(-1.0, 1.0, degree))


def entropy_dictionary(half_degree: int, random_count: int = 0,
                       seed: int = 0) -> List[Entropy]:
    """Finite stand-in for the normalized family {Phi : ||D^2 Phi|| <= 1}.

    Args:
        half_degree: K; modes cos kt, sin kt for k = 2..2K are included
        random_count: number of extra random polynomials of degree <= 2K
        seed: seed for the random polynomials

    Returns:
        Entropies Phi_f rescaled to c2_norm = 1; zero entropies are skipped
    """
    rng = np.random.default_rng(seed)
    sources: List[TrigPolynomial] = []
    for k in range(2, 2 * half_degree + 1):
        sources.append(TrigPolynomial.mode(k, 'cos'))
        sources.append(TrigPolynomial.mode(k, 'sin'))
    sources.extend(random_polynomial(2 * half_degree, rng) for _ in range(random_count))

    family = []
    for f in sources:
        entropy = build_entropy(f)
        if entropy.c2_norm > 0.0:
            family.append(entropy.scaled(1.0 / entropy.c2_norm))
    logger.info("entropy dictionary: K=%d, %d members", half_degree, len(family))
    return family


def c2_constant_estimate(sources: Sequence[TrigPolynomial]) -> Tuple[float, int]:
    """Empirical constant C in ||Phi_f||_{C^2} <= C ||f||_inf over the given sources.

    Returns:
        (largest ratio c2_norm / sup|f|, index of the maximizing source)
    """
    best, best_index = 0.0, -1
    for index, f in enumerate(sources):
        sup = f.sup_norm()
        if sup == 0.0:
            continue
        ratio = build_entropy(f).c2_norm / sup
        if ratio > best:
            best, best_index = ratio, index
    return best, best_index
